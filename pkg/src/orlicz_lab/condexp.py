"""Conditional expectation with respect to a partition.

On a finite grid the conditional expectation is weighted block averaging:
the unique block-constant function matching f's integral on every block
union.  Zero-measure blocks get value 0 (all identities are up to null
sets, so any value would do; 0 is deterministic).
"""

from __future__ import annotations

import numpy as np

from .measure import Partition, SpaceMismatchError, meet
from .orlicz import SimpleFunction

__all__ = [
    "cond_exp",
    "orth_complement",
    "quantize_levels",
    "tower_intersection_check",
]


def cond_exp(f: SimpleFunction, p: Partition) -> SimpleFunction:
    """Weighted block averages of f, broadcast back to the cells."""
    if not f.space.same_as(p.space):
        raise SpaceMismatchError("function and partition on different spaces")
    w = f.space.weights
    block_w = np.bincount(p.labels, weights=w, minlength=p.n_blocks)
    block_sum = np.bincount(p.labels, weights=w * f.values, minlength=p.n_blocks)
    means = np.divide(block_sum, block_w,
                      out=np.zeros_like(block_sum), where=block_w > 0.0)
    return SimpleFunction(f.space, means[p.labels])


def orth_complement(f: SimpleFunction, p: Partition) -> SimpleFunction:
    """f minus its conditional expectation; block averages vanish."""
    return f - cond_exp(f, p)


def quantize_levels(g: SimpleFunction, n_levels: int) -> SimpleFunction:
    """Floor each value of g in [0, 1] to the grid {0, 1/N, ..., 1}.

    Value v is replaced by (k-1)/N where v lies in [(k-1)/N, k/N), so the
    cellwise error stays below 1/N and the Luxemburg distance to g is at
    most (phi(1) * mu(Omega) + 1) / N for any gauge phi.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    v = g.values
    if v.min() < 0.0 or v.max() > 1.0:
        raise ValueError("quantize_levels requires 0 <= g <= 1 cellwise")
    return SimpleFunction(g.space, np.floor(v * n_levels) / n_levels)


def tower_intersection_check(f: SimpleFunction, b: Partition,
                             c: Partition) -> float:
    """Max over blocks D of the intersection algebra of
    |int_D E_b(E(f|c)) - int_D E(f|b^c)|.

    Both sides equal int_D f, so the discrepancy is pure float rounding;
    callers hold it to 1e-12 * scale(f).
    """
    if not f.space.same_as(b.space):
        raise SpaceMismatchError("function and partition on different spaces")
    m = meet(b, c)
    lhs = cond_exp(cond_exp(f, c), b)
    rhs = cond_exp(f, m)
    w = f.space.weights
    lhs_int = np.bincount(m.labels, weights=w * lhs.values, minlength=m.n_blocks)
    rhs_int = np.bincount(m.labels, weights=w * rhs.values, minlength=m.n_blocks)
    return float(np.abs(lhs_int - rhs_int).max())
