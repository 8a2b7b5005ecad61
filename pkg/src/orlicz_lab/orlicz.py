"""Simple functions on the grid, modular integrals, and the Luxemburg norm.

Functions are per-cell values, so every integral here is an exact weighted
sum; the only approximation anywhere is snapping continuous examples to
cell midpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .measure import DyadicSpace, MeasurableSet, SpaceMismatchError
from .young import ConjugateFunction, YoungFunction

__all__ = [
    "InvariantViolationError",
    "SimpleFunction",
    "integrate",
    "modular",
    "luxemburg_norm",
    "holder_pairing",
    "jensen_gap",
    "parse_function",
    "HolderResult",
    "JensenResult",
]

NORM_REL_TOL = 1e-12


class InvariantViolationError(RuntimeError):
    """A checked inequality failed beyond its tolerance."""


@dataclass(frozen=True)
class SimpleFunction:
    """Per-cell real values over a space; the discrete L^phi element."""

    space: DyadicSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.space.n_cells,):
            raise ValueError("values length must be 2**K")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, space: DyadicSpace, c: float) -> "SimpleFunction":
        return cls(space, np.full(space.n_cells, float(c)))

    @classmethod
    def zero(cls, space: DyadicSpace) -> "SimpleFunction":
        return cls.constant(space, 0.0)

    @classmethod
    def indicator(cls, s: MeasurableSet) -> "SimpleFunction":
        return cls(s.space, s.mask.astype(float))

    @classmethod
    def identity(cls, space: DyadicSpace) -> "SimpleFunction":
        """x -> x sampled at cell midpoints."""
        return cls(space, space.cell_midpoints())

    @classmethod
    def random(cls, space: DyadicSpace, seed: int, lo: float = -1.0,
               hi: float = 1.0) -> "SimpleFunction":
        rng = np.random.default_rng(seed)
        return cls(space, rng.uniform(lo, hi, space.n_cells))

    def _binary(self, other, op):
        if isinstance(other, SimpleFunction):
            if not self.space.same_as(other.space):
                raise SpaceMismatchError("operands belong to different spaces")
            return SimpleFunction(self.space, op(self.values, other.values))
        return SimpleFunction(self.space, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return SimpleFunction(self.space, -self.values)

    def abs(self) -> "SimpleFunction":
        return SimpleFunction(self.space, np.abs(self.values))

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


def integrate(f: SimpleFunction) -> float:
    """Exact integral: sum of values times cell weights."""
    return float(f.values @ f.space.weights)


def modular(f: SimpleFunction, phi, k: float) -> float:
    """The gauge integral of |f|/k: sum_i phi(|f_i|/k) * w_i.

    Strictly decreasing in k whenever f is nonzero on a positive-weight
    cell.  ``phi`` may be a YoungFunction or a conjugate evaluator.
    """
    if not k > 0.0:
        raise ValueError("modular requires k > 0")
    with np.errstate(over="ignore"):
        vals = np.asarray(phi(np.abs(f.values) / k))
    return float(vals @ f.space.weights)


def luxemburg_norm(f: SimpleFunction, phi, tol: float = NORM_REL_TOL) -> float:
    """inf{k > 0 : modular(f, phi, k) <= 1}, by bracket doubling plus
    bisection to relative tolerance tol.

    Returns 0 when f vanishes on every positive-weight cell (functions are
    identified up to null sets).  The returned k keeps modular(f, phi, k)
    <= 1, so the unit-ball property holds by construction.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    w = f.space.weights
    a = np.abs(f.values)
    if not np.all(np.isfinite(a)):
        raise ValueError("norm of a non-finite function")
    if a[w > 0.0].max(initial=0.0) == 0.0:
        return 0.0

    def mod(k):
        with np.errstate(over="ignore"):
            return float(np.asarray(phi(a / k)) @ w)

    lo, hi = 1.0, 1.0
    if mod(1.0) > 1.0:
        hi = 2.0
        while mod(hi) > 1.0:
            lo, hi = hi, hi * 2.0
    else:
        lo = 0.5
        while mod(lo) <= 1.0:
            lo, hi = lo * 0.5, lo
            if lo < 1e-300:
                raise ArithmeticError("norm bracketing underflow")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mod(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


class HolderResult(NamedTuple):
    pairing: float
    bound: float


def holder_pairing(f: SimpleFunction, g: SimpleFunction,
                   phi: YoungFunction) -> HolderResult:
    """The dual pairing of f and g with its two-sided gauge bound.

    pairing = integral of f*g;  bound = 2 * N_phi(f) * N_psi(g) with psi
    the complementary gauge.  Raises if |pairing| exceeds the bound.
    """
    if not f.space.same_as(g.space):
        raise SpaceMismatchError("operands belong to different spaces")
    psi: ConjugateFunction = phi.complementary()
    pairing = integrate(f * g)
    bound = 2.0 * luxemburg_norm(f, phi) * luxemburg_norm(g, psi)
    if abs(pairing) > bound + 1e-12 * max(1.0, bound):
        raise InvariantViolationError(
            f"pairing {pairing} exceeds gauge bound {bound}"
        )
    return HolderResult(pairing, bound)


def parse_function(spec: str, space: DyadicSpace,
                   granularity_K: int | None = None) -> SimpleFunction:
    """Build a SimpleFunction from config syntax.

    Supported: ``identity``, ``zero``, ``constant:c``, ``indicator:a,b``,
    ``random:seed``.  ``granularity_K`` pins the structure of indicator
    and random generators to a coarser dyadic scale, so the same function
    can be re-expressed on a finer grid; the identity always samples the
    full resolution.
    """
    g = space.K if granularity_K is None else granularity_K
    if not 0 <= g <= space.K:
        raise ValueError("granularity_K must lie in [0, space.K]")
    reps = 2 ** (space.K - g)
    name, _, arg = spec.strip().partition(":")
    name = name.strip().lower()
    if name == "identity":
        return SimpleFunction.identity(space)
    if name == "zero":
        return SimpleFunction.zero(space)
    if name == "constant":
        return SimpleFunction.constant(space, float(arg))
    if name == "indicator":
        try:
            a, b = (float(t) for t in arg.split(","))
        except ValueError:
            raise ValueError(f"bad indicator bounds in {spec!r}") from None
        coarse = MeasurableSet.interval(DyadicSpace.uniform(g), a, b)
        return SimpleFunction(space, np.repeat(coarse.mask, reps).astype(float))
    if name == "random":
        try:
            seed = int(arg)
        except ValueError:
            raise ValueError(f"bad random seed in {spec!r}") from None
        rng = np.random.default_rng(seed)
        return SimpleFunction(space, np.repeat(rng.uniform(-1.0, 1.0, 2**g), reps))
    raise ValueError(f"unknown function spec {spec!r}")


class JensenResult(NamedTuple):
    lhs: float
    rhs: float


def jensen_gap(f: SimpleFunction, phi: YoungFunction) -> JensenResult:
    """Both sides of the mean-value convexity inequality
    phi(mean(f)) <= mean(phi(f)), raising if it fails beyond 1e-12."""
    total = f.space.total
    lhs = float(phi(integrate(f) / total))
    rhs = integrate(SimpleFunction(f.space, np.asarray(phi(f.values)))) / total
    if lhs > rhs + 1e-12:
        raise InvariantViolationError(f"convexity gap violated: {lhs} > {rhs}")
    return JensenResult(lhs, rhs)
