"""Numerical unitary asymptotes of commuting operator tuples.

Construction of the universal intertwining pair (X, U) for power-bounded
commuting matrix tuples, joint spectral analysis of the unitary part,
quasianalyticity testing with hyperinvariant-subspace extraction, and
desk-scale models of the classical infinite-dimensional examples.
"""

__version__ = "0.1.0"

from . import errors
from .arcs import ArcSet
from .asymptote import (
    LimitOperator,
    NormControlReport,
    UnitaryAsymptote,
    annihilating_subspace,
    asymptote_of_inverse,
    build_asymptote,
    cesaro_limit,
    check_equivalence,
    check_orbit_conditions,
    commutant_mapping,
    direct_sum_asymptote,
    exact_limit,
    joint_root_decomposition,
    minimal_part,
    norm_control,
    recover_summands,
    transport_similarity,
    verify_universality,
)
from .examples import reproduce_example
from .hardy import (
    HardyToeplitzModel,
    ac_quasianalytic_check,
    ac_residual_sets,
    build_toeplitz_model,
)
from .quasi import (
    hyperinvariant_pullback,
    is_quasianalytic,
    local_residual_T,
    quasianalytic_set,
    split_non_quasianalytic,
    unitary_injection_test,
)
from .shifts import WeightedShiftModel, build_weighted_shift, nonexistence_diagnostic
from .spectral import (
    AtomicSpectralMeasure,
    AtomSet,
    LocalMeasure,
    functional_calculus,
    joint_diagonalize,
    local_residual_set,
    localize,
    scalar_spectral_vector,
    unitary_commutant_blocks,
)
from .specfile import format_report, parse_spec, tuple_to_text
from .tuples import (
    IntertwinerSpace,
    OperatorTuple,
    Subspace,
    commutant_basis,
    direct_sum,
    intertwiner_space,
    inverse_tuple,
    orbit_infimum,
    power,
    power_bound_estimate,
    spectral_radius_report,
    validate_tuple,
)

__all__ = [name for name in dir() if not name.startswith("_")]
