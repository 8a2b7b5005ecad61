"""Finite measure spaces on a dyadic grid, measurable sets, and partitions.

Every sigma-subalgebra of the 2**K-cell grid algebra is generated by a
partition of the cells into blocks, so partitions stand in for
sigma-subalgebras throughout: common refinement realizes the join, the
overlap-component coarsening realizes the intersection algebra, and set
approximation reduces to per-block mass comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "SpaceMismatchError",
    "WindowTooShortError",
    "DyadicSpace",
    "MeasurableSet",
    "Partition",
    "AmuResult",
    "mu",
    "symm_diff_measure",
    "join",
    "meet",
    "upper_limit",
    "lower_limit",
    "best_approx",
    "amu_member",
]


class SpaceMismatchError(ValueError):
    """Operands live on different measure spaces."""


class WindowTooShortError(RuntimeError):
    """A limit computation did not stabilize within the supplied window."""


@dataclass(frozen=True)
class DyadicSpace:
    """2**K grid cells over [0, 1) with nonnegative per-cell weights.

    Cell i represents the interval [i * 2**-K, (i+1) * 2**-K).
    """

    K: int
    weights: np.ndarray

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("resolution K must be >= 0")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (2**self.K,):
            raise ValueError("weights length must be 2**K")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("weights must be finite and nonnegative")
        if w.sum() <= 0.0:
            raise ValueError("total mass must be positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, K: int) -> "DyadicSpace":
        n = 2**K
        return cls(K, np.full(n, 1.0 / n))

    @classmethod
    def random(cls, K: int, seed: int) -> "DyadicSpace":
        n = 2**K
        rng = np.random.default_rng(seed)
        return cls(K, rng.uniform(0.5, 1.5, n) / n)

    @property
    def n_cells(self) -> int:
        return 2**self.K

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def cell_midpoints(self) -> np.ndarray:
        n = self.n_cells
        return (np.arange(n) + 0.5) / n

    def same_as(self, other: "DyadicSpace") -> bool:
        return self is other or (
            self.K == other.K and np.array_equal(self.weights, other.weights)
        )


def _require_same_space(a, b):
    if not a.space.same_as(b.space):
        raise SpaceMismatchError("operands belong to different spaces")


@dataclass(frozen=True)
class MeasurableSet:
    """Boolean cell mask over a space."""

    space: DyadicSpace
    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != (self.space.n_cells,):
            raise ValueError("mask length must be 2**K")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def empty(cls, space: DyadicSpace) -> "MeasurableSet":
        return cls(space, np.zeros(space.n_cells, dtype=bool))

    @classmethod
    def full(cls, space: DyadicSpace) -> "MeasurableSet":
        return cls(space, np.ones(space.n_cells, dtype=bool))

    @classmethod
    def interval(cls, space: DyadicSpace, a: float, b: float) -> "MeasurableSet":
        """Cells fully contained in [a, b), i.e. [a, b) snapped to the grid."""
        if not (0.0 <= a <= b <= 1.0):
            raise ValueError("interval must satisfy 0 <= a <= b <= 1")
        n = space.n_cells
        start = int(np.ceil(a * n - 1e-9))
        stop = int(np.floor(b * n + 1e-9))
        mask = np.zeros(n, dtype=bool)
        mask[start:max(start, stop)] = True
        return cls(space, mask)

    @classmethod
    def from01(cls, space: DyadicSpace, values: Sequence[int]) -> "MeasurableSet":
        return cls(space, np.asarray(values) != 0)

    def to01(self) -> np.ndarray:
        return self.mask.astype(int)

    def complement(self) -> "MeasurableSet":
        return MeasurableSet(self.space, ~self.mask)

    def union(self, other: "MeasurableSet") -> "MeasurableSet":
        _require_same_space(self, other)
        return MeasurableSet(self.space, self.mask | other.mask)

    def intersection(self, other: "MeasurableSet") -> "MeasurableSet":
        _require_same_space(self, other)
        return MeasurableSet(self.space, self.mask & other.mask)

    def measure(self) -> float:
        return float(self.space.weights[self.mask].sum())


def mu(space: DyadicSpace, s: MeasurableSet) -> float:
    """Total weight of the masked cells."""
    if not space.same_as(s.space):
        raise SpaceMismatchError("set does not belong to the given space")
    return s.measure()


def symm_diff_measure(a: MeasurableSet, b: MeasurableSet) -> float:
    """Measure of the symmetric difference; a pseudometric on sets."""
    _require_same_space(a, b)
    return float(a.space.weights[a.mask ^ b.mask].sum())


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel blocks by order of first occurrence."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse]


@dataclass(frozen=True)
class Partition:
    """Cell -> block labeling; the finitely generated sigma-subalgebra whose
    atoms are the blocks.

    Labels are stored canonically (numbered by first occurrence), so two
    partitions are equal iff their label arrays are equal.
    """

    space: DyadicSpace
    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.shape != (self.space.n_cells,):
            raise ValueError("labels length must be 2**K")
        lab = _canonical_labels(lab).astype(np.int64)
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)

    @classmethod
    def trivial(cls, space: DyadicSpace) -> "Partition":
        return cls(space, np.zeros(space.n_cells, dtype=np.int64))

    @classmethod
    def finest(cls, space: DyadicSpace) -> "Partition":
        return cls(space, np.arange(space.n_cells, dtype=np.int64))

    @classmethod
    def dyadic(cls, space: DyadicSpace, n_blocks: int) -> "Partition":
        """n_blocks equal interval blocks; n_blocks must be a power of two
        not exceeding 2**K so block boundaries align with the grid."""
        n = space.n_cells
        if n_blocks < 1 or (n_blocks & (n_blocks - 1)) != 0 or n_blocks > n:
            raise ValueError("n_blocks must be a power of two <= 2**K")
        return cls(space, np.arange(n) // (n // n_blocks))

    @classmethod
    def from_sets(cls, space: DyadicSpace, sets: Sequence[MeasurableSet]) -> "Partition":
        """Smallest partition making every given set a block union."""
        labels = np.zeros(space.n_cells, dtype=np.int64)
        for s in sets:
            if not space.same_as(s.space):
                raise SpaceMismatchError("generating set on a different space")
            labels = labels * 2 + s.mask
        return cls(space, labels)

    @classmethod
    def random(cls, space: DyadicSpace, n_blocks: int, seed: int) -> "Partition":
        if n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        rng = np.random.default_rng(seed)
        return cls(space, rng.integers(0, n_blocks, space.n_cells))

    @property
    def n_blocks(self) -> int:
        return int(self.labels.max()) + 1

    def block_masks(self) -> list[np.ndarray]:
        return [self.labels == b for b in range(self.n_blocks)]

    def block_sets(self) -> list[MeasurableSet]:
        return [MeasurableSet(self.space, m) for m in self.block_masks()]

    def block_weights(self) -> np.ndarray:
        return np.bincount(self.labels, weights=self.space.weights,
                           minlength=self.n_blocks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Partition)
            and self.space.same_as(other.space)
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.space.K, self.labels.tobytes()))

    def refines(self, coarser: "Partition") -> bool:
        """True iff every block of ``coarser`` is a union of our blocks."""
        return join(self, coarser) == self


def join(p: Partition, q: Partition) -> Partition:
    """Common refinement: blocks are the nonempty pairwise intersections."""
    _require_same_space(p, q)
    combined = p.labels * (q.labels.max() + 1) + q.labels
    return Partition(p.space, combined)


def meet(p: Partition, q: Partition) -> Partition:
    """Finest partition coarsening both: connected components of the
    block-overlap graph between p-blocks and q-blocks."""
    _require_same_space(p, q)
    np_blocks = p.n_blocks
    parent = np.arange(np_blocks + q.n_blocks)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pairs = np.unique(p.labels * (q.labels.max() + 1) + q.labels)
    qmod = q.labels.max() + 1
    for pair in pairs:
        pi, qi = divmod(int(pair), int(qmod))
        ri, rj = find(pi), find(np_blocks + qi)
        if ri != rj:
            parent[rj] = ri
    roots = np.array([find(b) for b in range(np_blocks)])
    return Partition(p.space, roots[p.labels])


def _stabilized_outer(terms: list[Partition], combine) -> Partition:
    acc = terms[0]
    for t in terms[1:]:
        nxt = combine(acc, t)
        if nxt == acc:
            return acc
        acc = nxt
    raise WindowTooShortError(
        "window too short: outer limit iterates did not stabilize"
    )


def _suffix_fold(seq: Sequence[Partition], combine) -> list[Partition]:
    out = [seq[-1]]
    for p in reversed(seq[:-1]):
        out.append(combine(p, out[-1]))
    out.reverse()
    return out


def upper_limit(seq: Sequence[Partition], m_max: int | None = None) -> Partition:
    """Meet over m of the suffix joins; asserts the outer chain stabilizes
    (two consecutive iterates equal) inside the window."""
    return _limit(seq, m_max, outer=meet, inner=join)


def lower_limit(seq: Sequence[Partition], m_max: int | None = None) -> Partition:
    """Join over m of the suffix meets; asserts stabilization as above."""
    return _limit(seq, m_max, outer=join, inner=meet)


def _limit(seq, m_max, outer, inner):
    seq = list(seq)
    if len(seq) < 2:
        raise WindowTooShortError("window too short: need at least 2 partitions")
    for p in seq[1:]:
        _require_same_space(seq[0], p)
    if m_max is None:
        m_max = max(2, len(seq) // 2)
    m_max = min(m_max, len(seq) - 1)
    tails = _suffix_fold(seq, inner)[: m_max + 1]
    return _stabilized_outer(tails, outer)


def best_approx(p: Partition, d: MeasurableSet) -> MeasurableSet:
    """Union of blocks where d holds the strict weight majority.

    Minimizes the symmetric-difference measure to d over all block unions;
    tie blocks are excluded, which keeps the output deterministic.
    """
    _require_same_space(p, d)
    w = p.space.weights
    inside = np.bincount(p.labels, weights=w * d.mask, minlength=p.n_blocks)
    block_w = np.bincount(p.labels, weights=w, minlength=p.n_blocks)
    keep = inside > (block_w - inside)
    return MeasurableSet(p.space, keep[p.labels])


@dataclass(frozen=True)
class AmuResult:
    """Tail-max membership verdict plus the raw distance trace, so callers
    can also read off subsequence behavior."""

    member: bool
    distances: np.ndarray = field(repr=False)


def amu_member(seq: Sequence[Partition], d: MeasurableSet, tol: float) -> AmuResult:
    """Is d approximable by block unions along the window?

    distances[n] is the best symmetric-difference distance achievable in
    seq[n]; membership requires the max over the last quarter of the window
    to fall below tol.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("sequence window is empty")
    dist = np.array([symm_diff_measure(best_approx(p, d), d) for p in seq])
    tail = dist[len(dist) - max(1, len(dist) // 4):]
    return AmuResult(bool(tail.max() < tol), dist)
