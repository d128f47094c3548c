"""Hypergraph learning with edge-dependent vertex weights and magnetic Laplacians.

The pipeline: hypergraphs whose vertices carry per-edge weights induce
non-reversible random walks; the walk's asymmetry is encoded in the phase of a
complex Hermitian Laplacian with a fixed or learnable charge; a complex-valued
convolutional network classifies vertices from that operator. Graph-reduction
baselines and a synthetic-data generator round out the package.
"""

from .hypergraph import (
    EdvwMatrix,
    Hypergraph,
    build_hypergraph,
    clique_expansion,
    degree_edvw,
    knn_hypergraph,
    star_expansion,
    tfidf_edvw,
)
from .walks import (
    StationaryDistribution,
    TransitionMatrix,
    edvw_transition,
    hitting_times,
    is_reversible,
    representative_digraph,
    stationary_distribution,
    unified_transition,
    zhou_transition,
)
from .maglap import (
    ChargeParams,
    MagneticLaplacian,
    PropagationOperator,
    convolve,
    fourier_transform,
    hermitian_adjacency,
    inverse_fourier,
    magnetic_laplacian,
    phase_matrix,
    propagation_operator,
    spectral_decomposition,
    symmetrize,
)
from .network import (
    ModelConfig,
    ModelState,
    SplitMask,
    adam_step,
    backward,
    complex_relu,
    evaluate,
    forward,
    loss,
    make_split,
    train,
)
from .baselines import (
    RealPropagator,
    clique_gcn_propagator,
    hgnn_star_laplacian,
    spectral_clustering_majority,
    train_real_gcn,
    zhou_laplacian,
)
from .generators import generate_planted_hypergraph, skewed_edvw_example
from .experiment import ExperimentConfig, ExperimentReport, run_experiment

__version__ = "0.1.0"
