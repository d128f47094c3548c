"""File formats: line-JSON hypergraphs, CSV features and labels, coordinate
text matrices, and JSON experiment reports.

Every format round-trips exactly: floats are written with ``repr`` so all
64-bit values survive, and vertex order is preserved through the header's
identifier list.  Malformed input raises ValueError naming the offending
line.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .hypergraph import EdvwMatrix, Hypergraph

__all__ = [
    "save_hypergraph",
    "load_hypergraph",
    "save_features",
    "load_features",
    "save_labels",
    "load_labels",
    "save_real_matrix",
    "load_real_matrix",
    "save_complex_matrix",
    "load_complex_matrix",
    "save_report",
    "load_report",
    "save_history",
]

HYPERGRAPH_FORMAT = "hypermag-hypergraph"
REPORT_FORMAT = "hypermag-report"
FORMAT_VERSION = 1


def _vertex_names(hypergraph: Hypergraph) -> list[str]:
    if hypergraph.vertex_ids is not None:
        return list(hypergraph.vertex_ids)
    return [str(v) for v in range(hypergraph.n_vertices)]


def save_hypergraph(path, hypergraph: Hypergraph, edvw: EdvwMatrix | None = None) -> None:
    """One JSON object per line: a versioned header, then one object per edge."""
    names = _vertex_names(hypergraph)
    dense = edvw.dense if edvw is not None else None
    if dense is not None and dense.shape != (hypergraph.n_vertices, hypergraph.n_edges):
        raise ValueError("EDVW shape does not match the hypergraph")
    with open(path, "w") as handle:
        header = {"format": HYPERGRAPH_FORMAT, "version": FORMAT_VERSION,
                  "vertices": names}
        handle.write(json.dumps(header) + "\n")
        for j, edge in enumerate(hypergraph.edges):
            record = {
                "edge": hypergraph.edge_ids[j] if hypergraph.edge_ids else f"e{j}",
                "vertices": [names[v] for v in edge],
                "weight": float(hypergraph.edge_weights[j]),
            }
            if dense is not None:
                record["edvw"] = [float(dense[v, j]) for v in edge]
            handle.write(json.dumps(record) + "\n")


def load_hypergraph(path) -> tuple[Hypergraph, EdvwMatrix | None]:
    """Inverse of ``save_hypergraph``; returns (hypergraph, edvw or None)."""
    path = Path(path)
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")

    def parse(line_no: int, text: str) -> dict:
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise ValueError(f"{path}: line {line_no}: expected a JSON object")
        return record

    header = parse(1, lines[0])
    if header.get("format") != HYPERGRAPH_FORMAT:
        raise ValueError(f"{path}: line 1: not a {HYPERGRAPH_FORMAT} header")
    if header.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: line 1: unsupported version {header.get('version')}")
    names = [str(v) for v in header.get("vertices", [])]
    if not names:
        raise ValueError(f"{path}: line 1: header lists no vertices")
    index = {name: i for i, name in enumerate(names)}

    edges, edge_ids, weights = [], [], []
    edvw_rows, edvw_cols, edvw_data = [], [], []
    edvw_seen = 0
    for line_no, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        record = parse(line_no, text)
        for key in ("edge", "vertices", "weight"):
            if key not in record:
                raise ValueError(f"{path}: line {line_no}: missing '{key}'")
        members = [str(v) for v in record["vertices"]]
        unknown = [v for v in members if v not in index]
        if unknown:
            raise ValueError(f"{path}: line {line_no}: unknown vertex '{unknown[0]}'")
        j = len(edges)
        indices = [index[v] for v in members]
        order = np.argsort(indices)
        edges.append(tuple(int(indices[i]) for i in order))
        edge_ids.append(str(record["edge"]))
        weights.append(float(record["weight"]))
        if "edvw" in record:
            gamma = [float(g) for g in record["edvw"]]
            if len(gamma) != len(members):
                raise ValueError(f"{path}: line {line_no}: edvw length mismatch")
            edvw_seen += 1
            for i in order:
                edvw_rows.append(indices[i])
                edvw_cols.append(j)
                edvw_data.append(gamma[i])
    if not edges:
        raise ValueError(f"{path}: no hyperedges")
    if edvw_seen not in (0, len(edges)):
        raise ValueError(f"{path}: edvw present on {edvw_seen} of {len(edges)} edges; "
                         "must be all or none")

    int_like = all(name.lstrip("-").isdigit() for name in names)
    identity = int_like and [str(i) for i in range(len(names))] == names
    hypergraph = Hypergraph(
        n_vertices=len(names),
        edges=tuple(edges),
        edge_weights=np.asarray(weights),
        vertex_ids=None if identity else tuple(names),
        edge_ids=tuple(edge_ids),
    )
    edvw = None
    if edvw_seen:
        values = sp.csr_matrix((edvw_data, (edvw_rows, edvw_cols)),
                               shape=(len(names), len(edges)))
        edvw = EdvwMatrix(values=values, normalized=False)
    return hypergraph, edvw


def save_features(path, hypergraph: Hypergraph, features=None) -> None:
    """CSV with a version comment; first column is the vertex identifier."""
    matrix = hypergraph.vertex_features if features is None else np.asarray(features, dtype=float)
    if matrix is None:
        raise ValueError("no features to save")
    if matrix.shape[0] != hypergraph.n_vertices:
        raise ValueError("feature rows must match the vertex count")
    names = _vertex_names(hypergraph)
    with open(path, "w", newline="") as handle:
        handle.write(f"# hypermag-features v{FORMAT_VERSION}\n")
        writer = csv.writer(handle)
        for name, row in zip(names, matrix):
            writer.writerow([name, *[repr(float(x)) for x in row]])


def load_features(path, hypergraph: Hypergraph | None = None):
    """Returns (ids, matrix); aligned to the hypergraph's vertex order if given."""
    path = Path(path)
    ids, rows = [], []
    width = None
    with open(path, newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: line {line_no}: need an id and at least one value")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"{path}: line {line_no}: expected {width} columns")
            try:
                rows.append([float(x) for x in row[1:]])
            except ValueError:
                raise ValueError(f"{path}: line {line_no}: non-numeric feature value") from None
            ids.append(row[0])
    if not rows:
        raise ValueError(f"{path}: no feature rows")
    matrix = np.asarray(rows)
    if hypergraph is None:
        return ids, matrix
    return ids, _align(path, hypergraph, ids, matrix)


def _align(path, hypergraph: Hypergraph, ids, values):
    names = _vertex_names(hypergraph)
    position = {name: i for i, name in enumerate(ids)}
    missing = [name for name in names if name not in position]
    if missing:
        raise ValueError(f"{path}: no row for vertex '{missing[0]}'")
    return values[[position[name] for name in names]]


def save_labels(path, hypergraph: Hypergraph, labels=None,
                class_names: tuple[str, ...] | None = None) -> None:
    """CSV rows of (vertex identifier, class string); unlabeled vertices skipped."""
    values = hypergraph.vertex_labels if labels is None else np.asarray(labels, dtype=int)
    if values is None:
        raise ValueError("no labels to save")
    names = _vertex_names(hypergraph)
    with open(path, "w", newline="") as handle:
        handle.write(f"# hypermag-labels v{FORMAT_VERSION}\n")
        writer = csv.writer(handle)
        for name, label in zip(names, values):
            if label < 0:
                continue
            text = class_names[label] if class_names else f"c{label}"
            writer.writerow([name, text])


def load_labels(path, hypergraph: Hypergraph):
    """Returns (labels, class_names): class strings mapped to indices in sorted
    order, -1 for vertices absent from the file."""
    path = Path(path)
    pairs = []
    with open(path, newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {line_no}: expected 'vertex,class'")
            pairs.append((row[0], row[1]))
    if not pairs:
        raise ValueError(f"{path}: no label rows")
    class_names = tuple(sorted({c for _, c in pairs}))
    class_index = {c: i for i, c in enumerate(class_names)}
    names = _vertex_names(hypergraph)
    index = {name: i for i, name in enumerate(names)}
    labels = np.full(hypergraph.n_vertices, -1)
    for name, c in pairs:
        if name not in index:
            raise ValueError(f"{path}: label for unknown vertex '{name}'")
        labels[index[name]] = class_index[c]
    return labels, class_names


def save_real_matrix(path, matrix) -> None:
    """Coordinate text: one 'n n nnz' header, then 'row col value' lines."""
    matrix = np.asarray(matrix, dtype=float)
    rows, cols = np.nonzero(matrix)
    with open(path, "w") as handle:
        handle.write(f"{matrix.shape[0]} {matrix.shape[1]} {len(rows)}\n")
        for i, j in zip(rows, cols):
            handle.write(f"{i} {j} {repr(float(matrix[i, j]))}\n")


def load_real_matrix(path) -> np.ndarray:
    path = Path(path)
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    try:
        n, m, nnz = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError(f"{path}: line 1: expected 'n n nnz' header") from None
    matrix = np.zeros((n, m))
    count = 0
    for line_no, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        parts = text.split()
        if len(parts) != 3:
            raise ValueError(f"{path}: line {line_no}: expected 'row col value'")
        try:
            i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"{path}: line {line_no}: malformed entry") from None
        if not (0 <= i < n and 0 <= j < m):
            raise ValueError(f"{path}: line {line_no}: index out of range")
        matrix[i, j] = value
        count += 1
    if count != nnz:
        raise ValueError(f"{path}: header promises {nnz} entries, found {count}")
    return matrix


def save_complex_matrix(path, matrix) -> None:
    """Coordinate text with split parts: 'row col real imag' per entry."""
    matrix = np.asarray(matrix, dtype=complex)
    rows, cols = np.nonzero(matrix)
    with open(path, "w") as handle:
        handle.write(f"{matrix.shape[0]} {matrix.shape[1]} {len(rows)}\n")
        for i, j in zip(rows, cols):
            value = matrix[i, j]
            handle.write(f"{i} {j} {repr(float(value.real))} {repr(float(value.imag))}\n")


def load_complex_matrix(path) -> np.ndarray:
    path = Path(path)
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    try:
        n, m, nnz = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError(f"{path}: line 1: expected 'n n nnz' header") from None
    matrix = np.zeros((n, m), dtype=complex)
    count = 0
    for line_no, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        parts = text.split()
        if len(parts) != 4:
            raise ValueError(f"{path}: line {line_no}: expected 'row col real imag'")
        try:
            i, j = int(parts[0]), int(parts[1])
            value = complex(float(parts[2]), float(parts[3]))
        except ValueError:
            raise ValueError(f"{path}: line {line_no}: malformed entry") from None
        if not (0 <= i < n and 0 <= j < m):
            raise ValueError(f"{path}: line {line_no}: index out of range")
        matrix[i, j] = value
        count += 1
    if count != nnz:
        raise ValueError(f"{path}: header promises {nnz} entries, found {count}")
    return matrix


def save_report(path, report: dict) -> None:
    payload = {"format": REPORT_FORMAT, "version": FORMAT_VERSION, **report}
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def load_report(path) -> dict:
    path = Path(path)
    with open(path) as handle:
        payload = json.load(handle)
    if payload.get("format") != REPORT_FORMAT:
        raise ValueError(f"{path}: not a {REPORT_FORMAT} file")
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {payload.get('version')}")
    return payload


def save_history(path, histories: list[list[tuple[int, float, float]]]) -> None:
    """Per-epoch training curves for each split as CSV."""
    with open(path, "w", newline="") as handle:
        handle.write(f"# hypermag-history v{FORMAT_VERSION}\n")
        writer = csv.writer(handle)
        writer.writerow(["split", "epoch", "loss", "test_accuracy"])
        for split, history in enumerate(histories):
            for epoch, value, accuracy in history:
                writer.writerow([split, epoch, repr(float(value)), repr(float(accuracy))])
