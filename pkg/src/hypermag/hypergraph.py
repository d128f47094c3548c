"""Hypergraph data model, graph expansions, and EDVW constructors.

A hypergraph is a vertex set, a collection of hyperedges (vertex subsets), and
a positive weight per hyperedge.  An EDVW matrix attaches an edge-dependent
vertex weight gamma_e(v) to every incidence; its support must equal the
incidence support.  Vertices and edges are dense 0-based indices internally;
external string identifiers, when present, are kept in an order-preserving map.

Invariants
----------
- every hyperedge is a nonempty subset of the vertex set
- edge weights are strictly positive
- EDVW: R[v, e] > 0 iff v is a member of e
- a "normalized" EDVW has per-edge column sums equal to the edge cardinality,
  which makes the induced random walk row-stochastic
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Hypergraph",
    "EdvwMatrix",
    "build_hypergraph",
    "clique_expansion",
    "star_expansion",
    "degree_edvw",
    "tfidf_edvw",
    "knn_hypergraph",
]


@dataclass(frozen=True)
class Hypergraph:
    """Immutable hypergraph with weighted hyperedges and optional vertex data.

    Fields
    ------
    n_vertices : number of vertices; vertices are the indices 0..n_vertices-1
    edges : tuple of hyperedges, each a sorted tuple of distinct vertex indices
    edge_weights : positive weight per hyperedge, shape (n_edges,)
    vertex_labels : optional class index per vertex (-1 marks unlabeled)
    vertex_features : optional real feature matrix, shape (n_vertices, f)
    vertex_ids, edge_ids : optional external identifiers, index-aligned
    """

    n_vertices: int
    edges: tuple[tuple[int, ...], ...]
    edge_weights: np.ndarray
    vertex_labels: np.ndarray | None = None
    vertex_features: np.ndarray | None = None
    vertex_ids: tuple[str, ...] | None = None
    edge_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("hypergraph needs at least one vertex")
        if len(self.edges) == 0:
            raise ValueError("hypergraph needs at least one hyperedge")
        for j, edge in enumerate(self.edges):
            if len(edge) == 0:
                raise ValueError(f"hyperedge {j} is empty")
            if len(set(edge)) != len(edge) or tuple(sorted(edge)) != edge:
                raise ValueError(f"hyperedge {j} must be a sorted tuple of distinct vertices")
            if edge[0] < 0 or edge[-1] >= self.n_vertices:
                raise ValueError(f"hyperedge {j} references a vertex outside [0, {self.n_vertices})")
        weights = np.asarray(self.edge_weights, dtype=float)
        object.__setattr__(self, "edge_weights", weights)
        if weights.shape != (len(self.edges),):
            raise ValueError("edge_weights must have one entry per hyperedge")
        if not np.all(weights > 0):
            raise ValueError("edge weights must be strictly positive")
        if self.vertex_labels is not None:
            labels = np.asarray(self.vertex_labels, dtype=int)
            object.__setattr__(self, "vertex_labels", labels)
            if labels.shape != (self.n_vertices,):
                raise ValueError("vertex_labels must have one entry per vertex")
        if self.vertex_features is not None:
            feats = np.asarray(self.vertex_features, dtype=float)
            object.__setattr__(self, "vertex_features", feats)
            if feats.ndim != 2 or feats.shape[0] != self.n_vertices:
                raise ValueError("vertex_features must be a (n_vertices, f) matrix")
        if self.vertex_ids is not None and len(self.vertex_ids) != self.n_vertices:
            raise ValueError("vertex_ids must have one entry per vertex")
        if self.edge_ids is not None and len(self.edge_ids) != len(self.edges):
            raise ValueError("edge_ids must have one entry per hyperedge")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def incidence(self) -> sp.csr_matrix:
        """Binary incidence matrix Y, shape (n_vertices, n_edges)."""
        rows = [v for edge in self.edges for v in edge]
        cols = [j for j, edge in enumerate(self.edges) for _ in edge]
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_vertices, self.n_edges))

    def vertex_degrees(self) -> np.ndarray:
        """Weighted degrees d(v) = sum of omega(e) over hyperedges containing v."""
        d = np.zeros(self.n_vertices)
        for edge, w in zip(self.edges, self.edge_weights):
            d[list(edge)] += w
        return d

    def edge_degrees(self) -> np.ndarray:
        """Edge cardinalities delta(e) = |e|."""
        return np.array([len(edge) for edge in self.edges], dtype=float)

    def with_vertex_data(self, labels=None, features=None) -> "Hypergraph":
        """Copy with vertex labels and/or features attached."""
        updates = {}
        if labels is not None:
            updates["vertex_labels"] = labels
        if features is not None:
            updates["vertex_features"] = features
        return dataclasses.replace(self, **updates)


@dataclass(frozen=True)
class EdvwMatrix:
    """Edge-dependent vertex weights gamma_e(v) stored as a sparse (n, m) matrix.

    ``normalized`` indicates that each column sums to the edge cardinality
    delta(e), the scaling under which the induced transition matrix is
    row-stochastic.
    """

    values: sp.csr_matrix
    normalized: bool = False

    def __post_init__(self):
        mat = sp.csr_matrix(self.values, dtype=float, copy=False)
        mat.eliminate_zeros()
        object.__setattr__(self, "values", mat)
        if mat.nnz and mat.data.min() < 0:
            raise ValueError("EDVW entries must be nonnegative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def dense(self) -> np.ndarray:
        return self.values.toarray()

    def check_support(self, hypergraph: Hypergraph) -> None:
        """Require support(R) to equal the incidence support of the hypergraph."""
        if self.shape != (hypergraph.n_vertices, hypergraph.n_edges):
            raise ValueError(
                f"EDVW shape {self.shape} does not match hypergraph "
                f"({hypergraph.n_vertices}, {hypergraph.n_edges})"
            )
        mat = self.values.tocsc()
        for j, edge in enumerate(hypergraph.edges):
            members = mat.indices[mat.indptr[j]:mat.indptr[j + 1]]
            if not np.array_equal(np.sort(members), np.asarray(edge)):
                raise ValueError(f"EDVW support of column {j} does not match hyperedge {j}")

    def normalize(self, hypergraph: Hypergraph) -> "EdvwMatrix":
        """Rescale each column so it sums to delta(e); required by EDVW walks."""
        self.check_support(hypergraph)
        col_sums = np.asarray(self.values.sum(axis=0)).ravel()
        if np.any(col_sums <= 0):
            j = int(np.argmin(col_sums))
            raise ValueError(f"hyperedge {j} has zero total EDVW; cannot normalize")
        scale = hypergraph.edge_degrees() / col_sums
        scaled = self.values @ sp.diags(scale)
        return EdvwMatrix(values=scaled.tocsr(), normalized=True)


def _is_member_collection(obj) -> bool:
    return isinstance(obj, (list, tuple, set, frozenset, np.ndarray))


def build_hypergraph(incidence_list, weights=None, *, n_vertices=None,
                     vertex_labels=None, vertex_features=None) -> Hypergraph:
    """Build a hypergraph from vertex collections or (edge_id, collection) pairs.

    Integer vertex identifiers are used as indices directly.  Any other
    identifiers are mapped to dense indices in sorted order and retained in
    ``vertex_ids``.  Weights default to 1.
    """
    incidence_list = list(incidence_list)
    if not incidence_list:
        raise ValueError("incidence list is empty")
    paired = all(
        _is_member_collection(item) and len(item) == 2 and _is_member_collection(item[1])
        for item in incidence_list
    )
    if paired:
        edge_ids = tuple(str(eid) for eid, _ in incidence_list)
        raw_edges = [list(members) for _, members in incidence_list]
    else:
        edge_ids = tuple(f"e{j}" for j in range(len(incidence_list)))
        raw_edges = [list(members) for members in incidence_list]
    if len(set(edge_ids)) != len(edge_ids):
        raise ValueError("duplicate edge identifiers")

    all_int = all(isinstance(v, (int, np.integer)) for edge in raw_edges for v in edge)
    if all_int:
        vertex_ids = None
        index = {v: int(v) for edge in raw_edges for v in edge}
        if any(v < 0 for v in index.values()):
            raise ValueError("integer vertex identifiers must be nonnegative")
        max_index = max(index.values())
        if n_vertices is None:
            n_vertices = max_index + 1
        elif max_index >= n_vertices:
            raise ValueError(f"vertex {max_index} outside [0, {n_vertices})")
    else:
        seen = sorted({str(v) for edge in raw_edges for v in edge})
        vertex_ids = tuple(seen)
        index = {vid: i for i, vid in enumerate(seen)}
        if n_vertices is None:
            n_vertices = len(seen)
        elif n_vertices < len(seen):
            raise ValueError("n_vertices smaller than the number of distinct identifiers")
        raw_edges = [[str(v) for v in edge] for edge in raw_edges]

    edges = tuple(tuple(sorted({index[v] for v in edge})) for edge in raw_edges)
    if weights is None:
        weights = np.ones(len(edges))
    return Hypergraph(
        n_vertices=int(n_vertices),
        edges=edges,
        edge_weights=np.asarray(weights, dtype=float),
        vertex_labels=vertex_labels,
        vertex_features=vertex_features,
        vertex_ids=vertex_ids,
        edge_ids=edge_ids,
    )


def clique_expansion(hypergraph: Hypergraph) -> np.ndarray:
    """Graph adjacency whose (u, v) entry counts hyperedges containing both.

    Uses the unweighted incidence; the diagonal is zeroed, so self-membership
    is discarded.  Distinct hypergraphs sharing all pairwise co-memberships
    collapse to the same expansion.
    """
    y = hypergraph.incidence()
    adj = (y @ y.T).toarray()
    np.fill_diagonal(adj, 0.0)
    return adj


def star_expansion(hypergraph: Hypergraph) -> sp.csr_matrix:
    """Bipartite adjacency [[0, Y], [Y^T, 0]] over vertices then edge-vertices."""
    y = hypergraph.incidence()
    n, m = y.shape
    return sp.bmat(
        [[sp.csr_matrix((n, n)), y], [y.T, sp.csr_matrix((m, m))]], format="csr"
    )


def degree_edvw(hypergraph: Hypergraph) -> EdvwMatrix:
    """EDVW from weighted vertex degrees: gamma_e(v) = d(v) / sum_{u in e} d(u).

    Columns sum to one; apply ``normalize`` before building a walk.
    """
    d = hypergraph.vertex_degrees()
    rows, cols, data = [], [], []
    for j, edge in enumerate(hypergraph.edges):
        members = np.asarray(edge)
        denom = d[members].sum()
        rows.extend(members)
        cols.extend([j] * len(members))
        data.extend(d[members] / denom)
    values = sp.csr_matrix(
        (data, (rows, cols)), shape=(hypergraph.n_vertices, hypergraph.n_edges)
    )
    return EdvwMatrix(values=values, normalized=False)


def tfidf_edvw(doc_term_counts) -> tuple[Hypergraph, EdvwMatrix]:
    """Documents-as-vertices hypergraph with one hyperedge per retained term.

    The EDVW entry for document d in the hyperedge of term t is
    tf-idf(t, d) = (count(t, d) / total count in d) * ln(n_docs / df(t))
    with raw counts and no smoothing.  Terms appearing in no document or in
    every document are dropped (the latter have zero idf), as are terms whose
    member tf-idf values have zero spread, since hyperedge weights are the
    standard deviation of the member EDVW values and must be positive.
    """
    counts = sp.csr_matrix(doc_term_counts, dtype=float)
    if counts.nnz and counts.data.min() < 0:
        raise ValueError("term counts must be nonnegative")
    n_docs, n_terms = counts.shape
    if n_docs < 1 or n_terms < 1:
        raise ValueError("count matrix must be nonempty")
    totals = np.asarray(counts.sum(axis=1)).ravel()
    if np.any(totals <= 0):
        d = int(np.argmin(totals))
        raise ValueError(f"document {d} has no terms")

    tf = sp.diags(1.0 / totals) @ counts
    df = np.asarray((counts > 0).sum(axis=0)).ravel()
    tfc = tf.tocsc()

    edges, edge_ids, weights = [], [], []
    rows, cols, data = [], [], []
    for t in range(n_terms):
        if df[t] == 0 or df[t] == n_docs:
            continue
        members = tfc.indices[tfc.indptr[t]:tfc.indptr[t + 1]]
        vals = tfc.data[tfc.indptr[t]:tfc.indptr[t + 1]] * np.log(n_docs / df[t])
        spread = float(np.std(vals))
        if spread == 0.0:
            continue
        order = np.argsort(members)
        j = len(edges)
        edges.append(tuple(int(v) for v in members[order]))
        edge_ids.append(f"t{t}")
        weights.append(spread)
        rows.extend(members[order])
        cols.extend([j] * len(members))
        data.extend(vals[order])
    if not edges:
        raise ValueError("no terms survive tf-idf filtering")

    hypergraph = Hypergraph(
        n_vertices=n_docs,
        edges=tuple(edges),
        edge_weights=np.asarray(weights),
        edge_ids=tuple(edge_ids),
    )
    values = sp.csr_matrix((data, (rows, cols)), shape=(n_docs, len(edges)))
    return hypergraph, EdvwMatrix(values=values, normalized=False)


def knn_hypergraph(features, k: int,
                   bandwidth: float | None = None) -> tuple[Hypergraph, EdvwMatrix]:
    """One hyperedge per vertex: the vertex and its k nearest neighbors.

    Similarities come from the kernel W[i, j] = exp(-2 D[i, j] / bandwidth)
    on Euclidean distances D; the bandwidth defaults to the median pairwise
    distance.  The EDVW of a member u of vertex v's hyperedge is W[v, u]; the
    anchor's own weight is W[v, v] = 1.  Distance ties are broken toward the
    lower vertex index.  Hyperedge weights are 1.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise ValueError("features must be a 2-d array")
    n = x.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, {n})")
    sq = np.sum(x * x, axis=1)
    dist_sq = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    dist = np.sqrt(dist_sq)
    if bandwidth is None:
        positive = dist[dist > 0]
        if positive.size == 0:
            raise ValueError("all points coincide; supply a bandwidth")
        bandwidth = float(np.median(positive))
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    kernel = np.exp(-2.0 * dist / bandwidth)

    edges, rows, cols, data = [], [], [], []
    for v in range(n):
        order = np.argsort(dist[v], kind="stable")  # ties resolve to lower index
        neighbors = [u for u in order if u != v][:k]
        edge = tuple(sorted({v, *neighbors}))
        j = len(edges)
        edges.append(edge)
        for u in edge:
            rows.append(u)
            cols.append(j)
            data.append(kernel[v, u])
    hypergraph = Hypergraph(
        n_vertices=n,
        edges=tuple(edges),
        edge_weights=np.ones(n),
        edge_ids=tuple(f"nn{v}" for v in range(n)),
    )
    values = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    return hypergraph, EdvwMatrix(values=values, normalized=False)
