"""Orlicz-space numerics on finite dyadic measure spaces.

Luxemburg norms, conditional expectations with respect to partition
algebras, and convergence diagnostics for sequences of sigma-subalgebras.
"""

from .condexp import (
    cond_exp,
    orth_complement,
    quantize_levels,
    tower_intersection_check,
)
from .convergence import (
    AlgebraSequence,
    ConvergenceReport,
    Delta2RequiredError,
    EquivalenceOutcome,
    PerpEstimate,
    SandwichReport,
    WeakPairingTraces,
    condexp_convergence_test,
    default_dual_battery,
    dyadic_example_trace,
    estimate_perp_algebra,
    indicator_bound_check,
    mu_convergence_test,
    muperp_equivalence_check,
    perp_convergence_test,
    sandwich_check,
    set_recovery_check,
    weak_pairing_trace,
)
from .measure import (
    AmuResult,
    DyadicSpace,
    MeasurableSet,
    Partition,
    SpaceMismatchError,
    WindowTooShortError,
    amu_member,
    best_approx,
    join,
    lower_limit,
    meet,
    mu,
    symm_diff_measure,
    upper_limit,
)
from .orlicz import (
    HolderResult,
    InvariantViolationError,
    JensenResult,
    SimpleFunction,
    holder_pairing,
    integrate,
    jensen_gap,
    luxemburg_norm,
    modular,
    parse_function,
)
from .young import (
    ConjugateFunction,
    Delta2Certificate,
    YoungFunction,
    check_delta2,
    parse_young,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraSequence",
    "AmuResult",
    "ConjugateFunction",
    "ConvergenceReport",
    "Delta2Certificate",
    "Delta2RequiredError",
    "DyadicSpace",
    "EquivalenceOutcome",
    "HolderResult",
    "InvariantViolationError",
    "JensenResult",
    "MeasurableSet",
    "Partition",
    "PerpEstimate",
    "SandwichReport",
    "SimpleFunction",
    "SpaceMismatchError",
    "WeakPairingTraces",
    "WindowTooShortError",
    "YoungFunction",
    "amu_member",
    "best_approx",
    "check_delta2",
    "cond_exp",
    "condexp_convergence_test",
    "default_dual_battery",
    "dyadic_example_trace",
    "estimate_perp_algebra",
    "holder_pairing",
    "indicator_bound_check",
    "integrate",
    "jensen_gap",
    "join",
    "lower_limit",
    "luxemburg_norm",
    "meet",
    "modular",
    "mu",
    "mu_convergence_test",
    "muperp_equivalence_check",
    "orth_complement",
    "parse_function",
    "parse_young",
    "perp_convergence_test",
    "quantize_levels",
    "sandwich_check",
    "set_recovery_check",
    "symm_diff_measure",
    "tower_intersection_check",
    "upper_limit",
    "weak_pairing_trace",
]
