"""Finite-space kernels, manifold learning, and contrastive training.

Everything operates on small, fully enumerable spaces so that each
learning algorithm can be checked against the object it provably
converges to: a PMI matrix, a positive-pair kernel, a low-rank spectral
factor, or a Mercer eigenbasis. The eigensolver, optimizer, and RNG are
all deterministic, so every number here is reproducible from a seed.
"""

__version__ = "0.1.0"

from .contrastive import (
    CorpusStats,
    PairProcess,
    ProbeTask,
    corpus_stats,
    dirichlet_conductance,
    expected_simclr_loss,
    infonce_loss,
    linear_probe_error,
    nce_loss,
    pair_process,
    sgns_expected_loss,
    shifted_pmi_matrix,
    sparsest_partition,
    spectral_loss,
    train_infonce,
    train_nce,
    train_sgns,
    train_spectral,
)
from .eigenfunctions import (
    EigenfunctionSet,
    mlp_eigenfunctions,
    neuralef_batch_loss,
    r_entry,
    train_eigenfunctions,
)
from .encoders import (
    EmbeddingTable,
    MlpEncoder,
    OptimizerConfig,
    grad_check,
    minimize,
    sigmoid,
    softmax,
)
from .kernel_approx import (
    NystromModel,
    RffModel,
    nystrom_eigenfunction,
    nystrom_fit,
    nystrom_gram_approx,
    rff_features,
    rff_sample,
    sample_landmarks,
)
from .kernels import (
    FiniteSpace,
    KernelSpec,
    SymMatrix,
    exp_pmi_kernel,
    gaussian_kernel,
    gram,
    is_psd,
    jacobi_eigh,
    linear_kernel,
    mercer_decompose,
    polynomial_kernel,
    positive_pair_kernel,
    table_kernel,
)
from .linear_dr import (
    MdsResult,
    PcaModel,
    double_center,
    low_rank_factor,
    mds_embed,
    pca_fit,
    pca_transform,
)
from .manifold import (
    DisconnectedGraphError,
    NeighborGraph,
    build_graph,
    graph_laplacian,
    isomap,
    laplacian_eigenmaps,
    latent_arc_length,
    lle_embed,
    lle_weights,
    shortest_paths,
    swiss_roll,
)
from .rng import Stream
from .verify import SUITE_NAMES, run_suite

__all__ = [
    "__version__",
    "Stream",
    "FiniteSpace",
    "KernelSpec",
    "SymMatrix",
    "jacobi_eigh",
    "gram",
    "is_psd",
    "mercer_decompose",
    "linear_kernel",
    "polynomial_kernel",
    "gaussian_kernel",
    "table_kernel",
    "exp_pmi_kernel",
    "positive_pair_kernel",
    "EmbeddingTable",
    "MlpEncoder",
    "OptimizerConfig",
    "minimize",
    "grad_check",
    "sigmoid",
    "softmax",
    "PcaModel",
    "MdsResult",
    "pca_fit",
    "pca_transform",
    "double_center",
    "mds_embed",
    "low_rank_factor",
    "NeighborGraph",
    "DisconnectedGraphError",
    "build_graph",
    "shortest_paths",
    "graph_laplacian",
    "isomap",
    "lle_weights",
    "lle_embed",
    "laplacian_eigenmaps",
    "swiss_roll",
    "latent_arc_length",
    "NystromModel",
    "RffModel",
    "nystrom_fit",
    "nystrom_eigenfunction",
    "nystrom_gram_approx",
    "sample_landmarks",
    "rff_sample",
    "rff_features",
    "CorpusStats",
    "corpus_stats",
    "shifted_pmi_matrix",
    "train_sgns",
    "sgns_expected_loss",
    "train_nce",
    "nce_loss",
    "PairProcess",
    "pair_process",
    "infonce_loss",
    "expected_simclr_loss",
    "train_infonce",
    "spectral_loss",
    "train_spectral",
    "dirichlet_conductance",
    "sparsest_partition",
    "ProbeTask",
    "linear_probe_error",
    "EigenfunctionSet",
    "r_entry",
    "neuralef_batch_loss",
    "train_eigenfunctions",
    "mlp_eigenfunctions",
    "SUITE_NAMES",
    "run_suite",
]
