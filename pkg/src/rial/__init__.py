"""Riemannian inexact augmented Lagrangian solver for nonsmooth composite
problems min over M of f(x) + h(A(x)), with sparse PCA / sparse CCA
benchmarks and a damped-dual baseline."""

from .errors import (
    ConditioningError,
    DimensionError,
    FeasibilityError,
    LineSearchStallError,
    ParameterError,
    RankDeficiencyError,
    RialError,
    UnsupportedError,
)
from .inner import InnerConfig, InnerResult, bb_stepsize, rgd_solve, theoretical_stepsize
from .kernels import backend_name
from .manifolds import GeneralizedStiefel, Manifold, ProductManifold, Stiefel
from .nonsmooth import (
    L1Norm,
    ZeroTerm,
    lipschitz_bound,
    moreau,
    moreau_gradient,
    moreau_value,
    prox,
)
from .outer import (
    ALState,
    IterationRecord,
    OuterConfig,
    dual_update,
    predict_outer_iterations,
    rial_solve,
    schedule_update,
)
from .problem import (
    CompositeProblem,
    Mapping,
    OracleCounter,
    SmoothnessConstants,
    identity_mapping,
)
from .problems import (
    CcaInstance,
    PcaInstance,
    build_nonlinear_test,
    build_sparse_cca,
    build_sparse_pca,
    generate_cca_data,
    generate_pca_data,
    sparsity,
)

__version__ = "0.1.0"

__all__ = [
    "ALState",
    "CcaInstance",
    "CompositeProblem",
    "ConditioningError",
    "DimensionError",
    "FeasibilityError",
    "GeneralizedStiefel",
    "InnerConfig",
    "InnerResult",
    "IterationRecord",
    "L1Norm",
    "LineSearchStallError",
    "Manifold",
    "Mapping",
    "OracleCounter",
    "OuterConfig",
    "ParameterError",
    "PcaInstance",
    "ProductManifold",
    "RankDeficiencyError",
    "RialError",
    "SmoothnessConstants",
    "Stiefel",
    "UnsupportedError",
    "ZeroTerm",
    "backend_name",
    "bb_stepsize",
    "build_nonlinear_test",
    "build_sparse_cca",
    "build_sparse_pca",
    "dual_update",
    "generate_cca_data",
    "generate_pca_data",
    "identity_mapping",
    "lipschitz_bound",
    "moreau",
    "moreau_gradient",
    "moreau_value",
    "predict_outer_iterations",
    "prox",
    "rgd_solve",
    "rial_solve",
    "schedule_update",
    "sparsity",
    "theoretical_stepsize",
]
