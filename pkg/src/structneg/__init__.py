"""Structured negativity: an SPA-based entanglement measure for d x d states."""

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NoConvergence,
    NonHermitianInput,
    NotNormalized,
    ParameterOutOfRange,
    StateValidationError,
)
from .measures import (
    MeasureReport,
    concurrence_lower_bound,
    concurrence_pure_2q,
    concurrence_pure_general,
    concurrence_wootters,
    is_separable_spa,
    measure_report,
    negativity,
    q_count,
    spa_pt,
    structured_negativity,
)
from .qstate import (
    BipartiteState,
    KrausSet,
    max_entangled,
    mems,
    partial_transpose_b,
    random_density,
    random_kraus_set,
    random_local_unitary,
    random_separable,
    realignment,
    rho_a,
    rho_alpha,
    werner,
)

__version__ = "0.1.0"
