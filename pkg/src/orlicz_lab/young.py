"""Young function families: evaluation, inverses, conjugates, doubling check.

A Young function here is an even convex gauge phi with phi(0) = 0,
phi(x) > 0 for x != 0, and phi(x)/x -> infinity.  Three families are
provided:

* ``power:p``    -- |x|**p for p > 1
* ``powerlog:p`` -- |x|**p * ln(e + |x|) for p >= 1
* ``expminus``   -- exp(|x|) - 1 - |x|
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "YoungFunction",
    "ConjugateFunction",
    "Delta2Certificate",
    "check_delta2",
    "parse_young",
]

_FAMILIES = ("power", "powerlog", "expminus")

# Root/maximization tolerances sit two orders below anything asserted
# against them, so solver error never shows up in the checks.
INVERSE_REL_TOL = 1e-12
CONJUGATE_TOL = 1e-10
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _increasing_root(fun, target, rel_tol=INVERSE_REL_TOL):
    """Solve fun(x) = target for fun continuous, increasing on [0, inf).

    Brackets by doubling from x = 1, then bisects.  Assumes fun(0) <= target
    and that fun is unbounded.
    """
    if target == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    with np.errstate(over="ignore"):
        for _ in range(200):
            if fun(hi) >= target:
                break
            lo, hi = hi, hi * 2.0
        else:
            raise ArithmeticError("bracket doubling failed to enclose the root")
        while hi - lo > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if fun(mid) < target:
                lo = mid
            else:
                hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class YoungFunction:
    """One member of the supported gauge families.

    Instances are callable; evaluation is even in x and vectorizes over
    numpy arrays.
    """

    family: str
    p: float = float("nan")

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown Young family {self.family!r}")
        if self.family == "power" and not self.p > 1.0:
            raise ValueError("power family requires p > 1 (superlinearity)")
        if self.family == "powerlog" and not self.p >= 1.0:
            raise ValueError("powerlog family requires p >= 1")

    @classmethod
    def power(cls, p: float) -> "YoungFunction":
        return cls("power", float(p))

    @classmethod
    def powerlog(cls, p: float) -> "YoungFunction":
        return cls("powerlog", float(p))

    @classmethod
    def expminus(cls) -> "YoungFunction":
        return cls("expminus")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("Young function evaluated at non-finite input")
        a = np.abs(x)
        if self.family == "power":
            out = a ** self.p
        elif self.family == "powerlog":
            out = a ** self.p * np.log(np.e + a)
        else:
            # exp(a) - 1 - a cancels catastrophically for small a; switch
            # to the series a^2/2 + a^3/6 + a^4/24 + a^5/120 there.
            with np.errstate(over="ignore"):
                direct = np.expm1(a) - a
            series = a * a * (0.5 + a * (1.0 / 6.0 + a * (1.0 / 24.0 + a / 120.0)))
            out = np.where(a <= 1e-3, series, direct)
        return out if out.ndim else float(out)

    def inverse(self, y: float) -> float:
        """The unique x >= 0 with phi(x) = y, by doubling plus bisection."""
        if not (np.isfinite(y) and y >= 0.0):
            raise ValueError("inverse requires finite y >= 0")
        return _increasing_root(self.__call__, float(y))

    def complementary(self) -> "ConjugateFunction":
        """The complementary gauge psi(y) = sup_{x>=0} (x|y| - phi(x))."""
        return ConjugateFunction(self)

    def spec(self) -> str:
        """Name in config syntax, e.g. ``power:2``."""
        if self.family == "expminus":
            return "expminus"
        return f"{self.family}:{self.p:g}"


@dataclass(frozen=True)
class ConjugateFunction:
    """Pointwise evaluator for the complementary gauge of ``base``.

    The inner objective x -> x|y| - phi(x) is concave, so the supremum is
    located by bracket doubling followed by golden-section maximization.
    The power family uses its closed form instead.
    """

    base: YoungFunction

    def __call__(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        if not np.all(np.isfinite(y)):
            raise ValueError("conjugate evaluated at non-finite input")
        if self.base.family == "power":
            p = self.base.p
            q = p / (p - 1.0)
            out = (p - 1.0) * (y / p) ** q
        else:
            out = self._numeric(y)
        return out if out.ndim else float(out)

    def _numeric(self, y: np.ndarray) -> np.ndarray:
        phi = self.base
        flat = y.ravel()
        out = np.zeros_like(flat)
        active = flat > 0.0
        if active.any():
            ya = flat[active]

            def obj(x):
                with np.errstate(over="ignore"):
                    return x * ya - phi(x)

            hi = np.ones_like(ya)
            for _ in range(200):
                grow = obj(2.0 * hi) > obj(hi)
                if not grow.any():
                    break
                hi[grow] *= 2.0
            else:
                raise ArithmeticError("conjugate bracket doubling failed")
            lo = np.zeros_like(ya)
            hi = 2.0 * hi
            # 0.618**60 ~ 3e-13 of the initial interval, below CONJUGATE_TOL.
            for _ in range(60):
                m1 = hi - _GOLDEN * (hi - lo)
                m2 = lo + _GOLDEN * (hi - lo)
                take_hi = obj(m1) < obj(m2)
                lo = np.where(take_hi, m1, lo)
                hi = np.where(take_hi, hi, m2)
            out[active] = np.maximum(obj(0.5 * (lo + hi)), 0.0)
        return out.reshape(y.shape)

    def inverse(self, y: float) -> float:
        """Some x >= 0 with psi(x) = y (unique wherever psi is strictly
        increasing, which holds for every y > 0 attained)."""
        if not (np.isfinite(y) and y >= 0.0):
            raise ValueError("inverse requires finite y >= 0")
        return _increasing_root(self.__call__, float(y))


@dataclass(frozen=True)
class Delta2Certificate:
    """Outcome of the numerical doubling check.

    ``witness_k`` is the largest observed phi(2x)/phi(x) on the sample grid;
    ``holds`` additionally requires that ratio to be stable across the two
    upper decades of the grid.  A certificate, not a proof.
    """

    holds: bool
    witness_k: float


def check_delta2(
    phi: YoungFunction,
    x0: float = 1.0,
    xmax: float = 1e4,
    n_samples: int = 200,
) -> Delta2Certificate:
    """Certify phi(2x) <= k*phi(x) on a geometric grid in [x0, xmax].

    The growth ratio is sampled on the grid; ``holds`` is true when the
    maximum ratio is finite and the per-decade maxima of the two upper
    decades agree within 5%.
    """
    if not (0.0 < x0 < xmax) or n_samples < 2:
        raise ValueError("check_delta2 requires 0 < x0 < xmax and n_samples >= 2")
    grid = np.geomspace(x0, xmax, n_samples)
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = phi(2.0 * grid) / phi(grid)
    witness = float(np.max(ratios))
    if not np.isfinite(witness):
        return Delta2Certificate(False, witness)

    decades = np.floor(np.log10(grid)).astype(int)
    tops = sorted(set(decades))[-2:]
    if len(tops) == 2:
        m_hi = float(np.max(ratios[decades == tops[1]]))
        m_lo = float(np.max(ratios[decades == tops[0]]))
    else:
        half = n_samples // 2
        m_lo = float(np.max(ratios[:half]))
        m_hi = float(np.max(ratios[half:]))
    stable = max(m_hi, m_lo) <= 1.05 * min(m_hi, m_lo)
    return Delta2Certificate(bool(stable), witness)


def parse_young(spec: str) -> YoungFunction:
    """Build a YoungFunction from config syntax: ``power:2``, ``powerlog:1.5``,
    ``expminus``."""
    name, _, arg = spec.strip().partition(":")
    name = name.strip().lower()
    if name == "expminus":
        if arg:
            raise ValueError("expminus takes no parameter")
        return YoungFunction.expminus()
    if name in ("power", "powerlog"):
        try:
            p = float(arg)
        except ValueError:
            raise ValueError(f"bad parameter in Young spec {spec!r}") from None
        return YoungFunction(name, p)
    raise ValueError(f"unknown Young spec {spec!r}")
