"""Self-expressive subspace clustering with and without the affine constraint."""
from .clustering import ClusteringResult, build_affinity, spectral_cluster
from .data import (
    DataMatrix,
    RandomModelSpec,
    derive_seed,
    generate_union_dataset,
    load_dataset,
    sample_points_on_subspace,
    sample_random_model,
    save_dataset,
)
from .geometry import (
    AffineSubspace,
    GeometryCheck,
    RankTolerance,
    aff_dim,
    direction_subspace,
    homogeneous_embed,
    is_affinely_disjoint,
    is_affinely_independent,
    numerical_rank,
    origin_in_affine_hull,
    span_dim,
    spans_linearly_independent,
)
from .metrics import acc, is_subspace_preserving, spr
from .solvers import (
    METHODS,
    ADMMParams,
    CoefficientMatrix,
    Mode,
    Regularizer,
    SolverConfig,
    compute_mu_z,
    lsr_exact,
    lsr_noisy,
    method_config,
    solve,
    ssc_solve,
)

__version__ = "0.1.0"
