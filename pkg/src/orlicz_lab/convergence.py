"""Convergence diagnostics for sequences of partition algebras.

Three notions are measured against a target algebra D over a finite
window of partitions A_n:

* measure convergence: every block of D is approximable by block unions
  of A_n in symmetric-difference measure;
* orthogonal convergence: orthogonal complements (w.r.t. D) of indicator
  functions chosen adversarially from A_n pair to zero against a battery
  of dual functions;
* joint convergence: both, equivalent to Luxemburg-norm convergence of
  the conditional expectations E(f|A_n) -> E(f|D) over a function battery.

Infinite sequences enter as finite windows with a declared tail period;
verdicts are tail-max tests over the last quarter of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .condexp import cond_exp, orth_complement
from .measure import (
    AmuResult,
    DyadicSpace,
    MeasurableSet,
    Partition,
    amu_member,
    best_approx,
    join,
    lower_limit,
    symm_diff_measure,
    upper_limit,
)
from .orlicz import InvariantViolationError, SimpleFunction, luxemburg_norm
from .young import YoungFunction, check_delta2

__all__ = [
    "Delta2RequiredError",
    "AlgebraSequence",
    "ConvergenceReport",
    "WeakPairingTraces",
    "PerpEstimate",
    "SandwichReport",
    "EquivalenceOutcome",
    "mu_convergence_test",
    "weak_pairing_trace",
    "perp_convergence_test",
    "condexp_convergence_test",
    "default_dual_battery",
    "muperp_equivalence_check",
    "indicator_bound_check",
    "set_recovery_check",
    "estimate_perp_algebra",
    "sandwich_check",
    "dyadic_example_trace",
]

CESARO_THRESHOLDS = (0.25, 0.5, 0.75)


class Delta2RequiredError(ValueError):
    """The gauge failed the doubling certificate required by the
    orthogonal-convergence machinery."""


def _require_delta2(phi: YoungFunction):
    if not check_delta2(phi).holds:
        raise Delta2RequiredError(
            f"gauge {phi.spec()} fails the doubling certificate; "
            "weak-pairing diagnostics need a doubling gauge"
        )


@dataclass(frozen=True)
class AlgebraSequence:
    """A finite window of partitions plus its declared tail structure."""

    partitions: tuple[Partition, ...]
    period: int = 1
    kind: str = "explicit"

    def __post_init__(self):
        parts = tuple(self.partitions)
        if len(parts) < 4:
            raise ValueError("window_length must be >= 4")
        for p in parts[1:]:
            if not parts[0].space.same_as(p.space):
                raise ValueError("all partitions must share one space")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        object.__setattr__(self, "partitions", parts)

    @classmethod
    def constant(cls, p: Partition, window_length: int) -> "AlgebraSequence":
        return cls((p,) * window_length, period=1, kind="constant")

    @classmethod
    def periodic(cls, cycle: Sequence[Partition],
                 window_length: int) -> "AlgebraSequence":
        cycle = list(cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        parts = tuple(cycle[n % len(cycle)] for n in range(window_length))
        return cls(parts, period=len(cycle), kind="periodic")

    @classmethod
    def dyadic_refinement(cls, space: DyadicSpace, window_length: int,
                          j_start: int = 1) -> "AlgebraSequence":
        """Interval partitions into 2**j blocks, j increasing from j_start
        and clamped at the grid resolution (so the tail is constant)."""
        parts = tuple(
            Partition.dyadic(space, 2 ** min(j_start + n, space.K))
            for n in range(window_length)
        )
        return cls(parts, period=1, kind="refining")

    @property
    def space(self) -> DyadicSpace:
        return self.partitions[0].space

    @property
    def window(self) -> int:
        return len(self.partitions)


def _tail(arr: np.ndarray) -> np.ndarray:
    return arr[len(arr) - max(1, len(arr) // 4):]


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-n traces with tail-max verdicts and the tolerances that
    produced them."""

    window: int
    traces: dict[str, np.ndarray]
    verdicts: dict[str, bool]
    tolerances: dict[str, float]

    def __post_init__(self):
        for name, arr in self.traces.items():
            if len(arr) != self.window:
                raise ValueError(f"trace {name!r} length != window")

    def iter_csv_rows(self, prefix: str = ""):
        """Yield (n, metric-name, value) rows for CSV emission."""
        for name, arr in self.traces.items():
            for n, v in enumerate(arr):
                yield n, prefix + name, float(v)


def _indicator_norm_threshold(phi: YoungFunction, tol: float) -> float:
    """Luxemburg norm of an indicator-difference at set distance tol:
    the exact transform between the two convergence scales."""
    return 1.0 / phi.inverse(1.0 / tol)


def mu_convergence_test(
    seq: AlgebraSequence,
    target: Partition,
    tol: float,
    phi: YoungFunction = YoungFunction.power(2.0),
) -> ConvergenceReport:
    """Approximate every target block by block unions along the window.

    For each block D the trace records the best symmetric-difference
    distance per n and the Luxemburg norm of the matching indicator
    difference; the two tail verdicts must agree (they are linked by an
    exact monotone transform) and the overall verdict requires every
    block to pass.
    """
    if not seq.space.same_as(target.space):
        raise ValueError("sequence and target on different spaces")
    norm_tol = _indicator_norm_threshold(phi, tol)
    traces: dict[str, np.ndarray] = {}
    block_ok = []
    dist_rows, norm_rows = [], []
    for i, block in enumerate(target.block_sets()):
        chi_d = SimpleFunction.indicator(block)
        dists = np.empty(seq.window)
        norms = np.empty(seq.window)
        for n, p in enumerate(seq.partitions):
            approx = best_approx(p, block)
            dists[n] = symm_diff_measure(approx, block)
            norms[n] = luxemburg_norm(SimpleFunction.indicator(approx) - chi_d, phi)
        ok_dist = bool(_tail(dists).max() < tol)
        ok_norm = bool(_tail(norms).max() < norm_tol)
        if ok_dist != ok_norm:
            raise InvariantViolationError(
                "measure-distance and Orlicz-norm verdicts disagree "
                f"on block {i} (dist={ok_dist}, norm={ok_norm})"
            )
        block_ok.append(ok_dist)
        traces[f"mu_dist[b{i}]"] = dists
        traces[f"mu_norm[b{i}]"] = norms
        dist_rows.append(dists)
        norm_rows.append(norms)
    traces["mu_dist_max"] = np.max(dist_rows, axis=0)
    traces["mu_norm_max"] = np.max(norm_rows, axis=0)
    return ConvergenceReport(
        window=seq.window,
        traces=traces,
        verdicts={"mu": all(block_ok)},
        tolerances={"tol": tol, "norm_tol": norm_tol},
    )


def _adversarial_pairing(p: Partition, h: np.ndarray) -> float:
    """max over block unions U of |sum_{U} w*h|.

    The pairing is linear in the mask, so the optimum takes all blocks of
    one sign: the greedy per-block choice is exact.
    """
    c = np.bincount(p.labels, weights=p.space.weights * h, minlength=p.n_blocks)
    return float(max(c[c > 0.0].sum(initial=0.0), -c[c < 0.0].sum(initial=0.0)))


@dataclass(frozen=True)
class WeakPairingTraces:
    """Pairing traces against each battery element, in both modes:
    adversarial indicator unions and conditional expectations of f."""

    set_mode: dict[str, np.ndarray]
    function_mode: dict[str, np.ndarray]


def weak_pairing_trace(
    seq: AlgebraSequence,
    d_target: Partition,
    f: SimpleFunction,
    battery: Sequence[SimpleFunction],
    phi: YoungFunction,
) -> WeakPairingTraces:
    """Dual pairings of orthogonal complements against a battery.

    Set mode pairs E_perp(chi_A) for the block union A of each A_n that
    maximizes |pairing| against the battery element; function mode pairs
    E_perp(E(f|A_n)).  Requires a doubling gauge.
    """
    _require_delta2(phi)
    if not seq.space.same_as(d_target.space):
        raise ValueError("sequence and target on different spaces")
    w = seq.space.weights
    set_mode: dict[str, np.ndarray] = {}
    function_mode: dict[str, np.ndarray] = {}
    cond_fs = [orth_complement(cond_exp(f, p), d_target) for p in seq.partitions]
    for i, g in enumerate(battery):
        h = orth_complement(g, d_target).values
        set_arr = np.array(
            [_adversarial_pairing(p, h) for p in seq.partitions]
        )
        fun_arr = np.array(
            [abs(float((e.values * g.values) @ w)) for e in cond_fs]
        )
        set_mode[f"g{i}"] = set_arr
        function_mode[f"g{i}"] = fun_arr
    return WeakPairingTraces(set_mode, function_mode)


@dataclass(frozen=True)
class PerpEstimate:
    """Estimated orthogonal-limit algebra: Cesaro averages of canonical
    selector sequences along tail residue classes, thresholded into
    generating sets.  An estimate, not the abstract limit algebra."""

    partition: Partition
    generators: list[MeasurableSet]


def estimate_perp_algebra(seq: AlgebraSequence) -> PerpEstimate:
    space = seq.space
    window = seq.window
    tail_start = window - max(1, window // 4)
    generators: list[MeasurableSet] = []
    seen: set[bytes] = set()
    acc = Partition.trivial(space)
    for r in range(seq.period):
        idxs = [n for n in range(tail_start, window) if n % seq.period == r]
        if not idxs:
            continue
        p_last = seq.partitions[idxs[-1]]
        for bmask in p_last.block_masks():
            bset = MeasurableSet(space, bmask)
            cesaro = np.mean(
                [best_approx(seq.partitions[n], bset).mask for n in idxs],
                axis=0,
            )
            for theta in CESARO_THRESHOLDS:
                smask = cesaro > theta
                key = smask.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                s = MeasurableSet(space, smask)
                generators.append(s)
                acc = join(acc, Partition.from_sets(space, [s]))
    return PerpEstimate(acc, generators)


def perp_convergence_test(
    seq: AlgebraSequence,
    d_target: Partition,
    battery: Sequence[SimpleFunction],
    phi: YoungFunction,
    tol: float,
) -> ConvergenceReport:
    """Orthogonal convergence: adversarial set-mode pairings must vanish
    in tail-max against every battery element.

    Also reports whether the estimated orthogonal-limit algebra sits
    between the lower and upper limits of the window.
    """
    _require_delta2(phi)
    traces: dict[str, np.ndarray] = {}
    ok = True
    for i, g in enumerate(battery):
        h = orth_complement(g, d_target).values
        arr = np.array([_adversarial_pairing(p, h) for p in seq.partitions])
        traces[f"perp_pairing[g{i}]"] = arr
        ok = ok and bool(_tail(arr).max() < tol)
    est = estimate_perp_algebra(seq)
    lower = lower_limit(seq.partitions)
    upper = upper_limit(seq.partitions)
    verdicts = {
        "perp": ok,
        "aperp_contains_lower": est.partition.refines(lower),
        "aperp_within_upper": upper.refines(est.partition),
    }
    return ConvergenceReport(
        window=seq.window,
        traces=traces,
        verdicts=verdicts,
        tolerances={"tol": tol},
    )


def condexp_convergence_test(
    f: SimpleFunction,
    seq: AlgebraSequence,
    d_target: Partition,
    phi: YoungFunction,
    tol: float,
) -> ConvergenceReport:
    """Luxemburg-norm trace of E(f|A_n) - E(f|D) with a tail-max verdict."""
    _require_delta2(phi)
    f_d = cond_exp(f, d_target)
    arr = np.array(
        [luxemburg_norm(cond_exp(f, p) - f_d, phi) for p in seq.partitions]
    )
    return ConvergenceReport(
        window=seq.window,
        traces={"condexp_norm": arr},
        verdicts={"condexp": bool(_tail(arr).max() < tol)},
        tolerances={"tol": tol},
    )


def default_dual_battery(
    seq: AlgebraSequence,
    d_target: Partition,
    size: int = 32,
    seed: int = 0,
) -> list[SimpleFunction]:
    """Block indicators of the upper limit and the target, topped up with
    seeded random functions to ``size`` elements."""
    space = seq.space
    battery: list[SimpleFunction] = []
    seen: set[bytes] = set()
    for s in upper_limit(seq.partitions).block_sets() + d_target.block_sets():
        key = s.mask.tobytes()
        if key not in seen:
            seen.add(key)
            battery.append(SimpleFunction.indicator(s))
    for j in range(max(0, size - len(battery))):
        battery.append(SimpleFunction.random(space, seed * 7919 + j))
    return battery


@dataclass(frozen=True)
class EquivalenceOutcome:
    """All three verdicts on one scenario plus the underlying reports."""

    mu: ConvergenceReport
    perp: ConvergenceReport
    condexp: dict[str, ConvergenceReport] = field(repr=False)
    verdict_mu: bool = False
    verdict_perp: bool = False
    verdict_condexp: bool = False

    @property
    def verdict_muperp(self) -> bool:
        return self.verdict_mu and self.verdict_perp


def muperp_equivalence_check(
    seq: AlgebraSequence,
    d_target: Partition,
    phi: YoungFunction,
    tol: float,
    n_random_f: int = 8,
    g_battery_size: int = 32,
    seed: int = 0,
) -> EquivalenceOutcome:
    """Run all three convergence tests and assert the equivalence:
    the aggregate conditional-expectation verdict over an f battery
    (target-block indicators, the identity, seeded random functions)
    must equal (measure verdict AND orthogonal verdict).
    """
    battery_g = default_dual_battery(seq, d_target, size=g_battery_size,
                                     seed=seed + 1)
    mu_rep = mu_convergence_test(seq, d_target, tol, phi=phi)
    perp_rep = perp_convergence_test(seq, d_target, battery_g, phi, tol)

    f_battery: dict[str, SimpleFunction] = {}
    for i, s in enumerate(d_target.block_sets()):
        f_battery[f"indicator[b{i}]"] = SimpleFunction.indicator(s)
    f_battery["identity"] = SimpleFunction.identity(seq.space)
    for j in range(n_random_f):
        f_battery[f"random{j}"] = SimpleFunction.random(seq.space,
                                                        seed * 104729 + j)
    condexp_reps = {
        name: condexp_convergence_test(f, seq, d_target, phi, tol)
        for name, f in f_battery.items()
    }
    v_condexp = all(r.verdicts["condexp"] for r in condexp_reps.values())
    v_mu = mu_rep.verdicts["mu"]
    v_perp = perp_rep.verdicts["perp"]
    if v_condexp != (v_mu and v_perp):
        raise InvariantViolationError(
            "equivalence broke: condexp verdict "
            f"{v_condexp} vs mu={v_mu} and perp={v_perp}"
        )
    return EquivalenceOutcome(
        mu=mu_rep,
        perp=perp_rep,
        condexp=condexp_reps,
        verdict_mu=v_mu,
        verdict_perp=v_perp,
        verdict_condexp=v_condexp,
    )


def indicator_bound_check(
    seq: AlgebraSequence,
    d: MeasurableSet,
    phi: YoungFunction,
) -> float:
    """Largest excess of N_phi(E(chi_D|A_n) - chi_D) over the set-distance
    bound 2 / phi^{-1}(1 / (2 * mu(A_n* delta D))), best approximants A_n*.

    Steps with exact representation (distance 0) are skipped; returns 0
    when every step is skipped.  Contract: result <= 1e-9.
    """
    chi_d = SimpleFunction.indicator(d)
    excesses = []
    for p in seq.partitions:
        dist = symm_diff_measure(best_approx(p, d), d)
        if dist <= 0.0:
            continue
        lhs = luxemburg_norm(cond_exp(chi_d, p) - chi_d, phi)
        rhs = 2.0 / phi.inverse(1.0 / (2.0 * dist))
        excesses.append(lhs - rhs)
    return max(excesses, default=0.0)


def set_recovery_check(
    seq: AlgebraSequence,
    d: MeasurableSet,
    phi: YoungFunction | None = None,
) -> float:
    """Largest violation of the recovery inequality
    mu(A_n delta D) / 2 <= integral |E(chi_D|A_n) - chi_D|,
    with A_n the half-level superset {E(chi_D|A_n) > 1/2}.

    The inequality is gauge-free; ``phi`` is accepted for interface
    symmetry and ignored.  Contract: result <= 1e-12.
    """
    del phi
    space = seq.space
    chi_d = SimpleFunction.indicator(d)
    worst = -np.inf
    for p in seq.partitions:
        e = cond_exp(chi_d, p)
        a_n = MeasurableSet(space, e.values > 0.5)
        lhs = 0.5 * symm_diff_measure(a_n, d)
        rhs = float(np.abs(e.values - chi_d.values) @ space.weights)
        worst = max(worst, lhs - rhs)
    return float(worst)


@dataclass(frozen=True)
class SandwichReport:
    """Limit algebras of the window with the membership checks tying them
    to the measure- and orthogonal-limit estimates."""

    lower: Partition
    upper: Partition
    amu_results: list[AmuResult]
    amu_all_member: bool
    perp_estimate: Partition
    perp_generators: list[MeasurableSet]
    generators_upper_measurable: bool
    muperp: bool


def sandwich_check(seq: AlgebraSequence,
                   membership_tol: float = 1e-9) -> SandwichReport:
    """Compute lower/upper limits, verify every lower block is measure-
    approximable along the window and every estimated orthogonal-limit
    generator is upper-limit measurable, and report whether the two limit
    estimates generate the same algebra (the joint-convergence verdict).
    """
    parts = list(seq.partitions)
    lower = lower_limit(parts)
    upper = upper_limit(parts)
    amu_results = [amu_member(parts, b, membership_tol)
                   for b in lower.block_sets()]
    amu_ok = all(r.member for r in amu_results)
    est = estimate_perp_algebra(seq)
    gens_ok = all(
        upper.refines(Partition.from_sets(seq.space, [g]))
        for g in est.generators
    )
    return SandwichReport(
        lower=lower,
        upper=upper,
        amu_results=amu_results,
        amu_all_member=amu_ok,
        perp_estimate=est.partition,
        perp_generators=est.generators,
        generators_upper_measurable=gens_ok,
        muperp=amu_ok and gens_ok and (lower == est.partition),
    )


def dyadic_example_trace(
    n_max: int,
    phi: YoungFunction,
    f_spec: str,
    K: int,
    tol: float = 1e-3,
    extra_resolution: int = 4,
) -> list[tuple[int, float]]:
    """Error trace N_phi(E(f|G_n) - f) for the interval partitions G_n
    into n = 2, 4, ..., n_max blocks on the uniform unit-interval grid.

    n values must be powers of two <= 2**K so blocks align with the grid.
    Continuous generators (the identity) are evaluated at resolution
    K + extra_resolution so the within-cell discretization stays well
    below the reported errors; K-granular generators (indicators, random)
    are unaffected.  Asserts the trace is nonincreasing with final value
    below tol.
    """
    from .orlicz import parse_function

    if n_max < 2 or (n_max & (n_max - 1)) != 0 or n_max > 2**K:
        raise ValueError("n_max must be a power of two with 2 <= n_max <= 2**K")
    k_sim = min(K + extra_resolution, 24)
    space = DyadicSpace.uniform(k_sim)
    f = parse_function(f_spec, space, granularity_K=K)
    out: list[tuple[int, float]] = []
    n = 2
    while n <= n_max:
        p = Partition.dyadic(space, n)
        err = luxemburg_norm(cond_exp(f, p) - f, phi)
        if out and err > out[-1][1] + 1e-12:
            raise InvariantViolationError(
                f"error trace increased at n={n}: {err} > {out[-1][1]}"
            )
        out.append((n, err))
        n *= 2
    if out[-1][1] >= tol:
        raise InvariantViolationError(
            f"final error {out[-1][1]} is not below tol={tol}"
        )
    return out
