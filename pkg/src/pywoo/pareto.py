"""Pareto dominance, non-dominated archives and the additive epsilon indicator.

All objectives are minimized. Comparisons are exact; no tolerance is applied.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import DomainError, as_vector

logger = logging.getLogger(__name__)


class DominanceRelation(enum.Enum):
    STRICTLY_DOMINATES = "strictly_dominates"
    DOMINATES = "dominates"
    WEAKLY_DOMINATES = "weakly_dominates"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


def compare(y1, y2) -> DominanceRelation:
    """Classify how ``y1`` relates to ``y2``, returning the strongest label that applies.

    The relation is one-directional: when ``y2`` dominates ``y1`` the result is
    ``INCOMPARABLE``; call ``compare(y2, y1)`` for the converse.
    """
    a = np.asarray(y1, dtype=np.float64)
    b = np.asarray(y2, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"length mismatch: {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        return DominanceRelation.EQUAL
    if np.all(a < b):
        return DominanceRelation.STRICTLY_DOMINATES
    le = np.all(a <= b)
    if le and np.any(a < b):
        return DominanceRelation.DOMINATES
    if le:
        return DominanceRelation.WEAKLY_DOMINATES
    return DominanceRelation.INCOMPARABLE


def dominates(y1, y2) -> bool:
    """``y1`` is no worse everywhere and strictly better somewhere."""
    return bool(np.all(y1 <= y2) and np.any(y1 < y2))


def weakly_dominates(y1, y2) -> bool:
    return bool(np.all(y1 <= y2))


@dataclass
class InsertionReport:
    accepted: bool
    evicted: list = field(default_factory=list)


@dataclass
class ArchiveMember:
    x: np.ndarray
    y: np.ndarray
    order: int


class ParetoArchive:
    """Mutually non-dominated set of (decision vector, objective vector) pairs.

    Members never dominate or equal one another. When two candidates share an
    objective vector, the first one inserted is kept.
    """

    def __init__(self, m: int | None = None):
        self.m = m
        self._members: list[ArchiveMember] = []
        self._Y = np.empty((0, m if m else 0))
        self._next_order = 0

    def __len__(self):
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    @property
    def members(self) -> list[ArchiveMember]:
        return list(self._members)

    @property
    def objectives(self) -> np.ndarray:
        """(k, m) array of member objective vectors in insertion order."""
        return self._Y.copy()

    @property
    def decisions(self) -> np.ndarray:
        if not self._members:
            return np.empty((0, 0))
        return np.vstack([mem.x for mem in self._members])

    def insert(self, x, y) -> InsertionReport:
        y = as_vector(y, dim=self.m, name="objective vector")
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if self.m is None:
            self.m = y.size
            self._Y = np.empty((0, self.m))
        Y = self._Y
        if len(Y) and np.any(np.all(Y <= y, axis=1)):
            return InsertionReport(accepted=False)
        dominated = np.all(y <= Y, axis=1) & np.any(y < Y, axis=1)
        evicted = []
        if np.any(dominated):
            keep = []
            for mem, gone in zip(self._members, dominated):
                if gone:
                    evicted.append(mem)
                else:
                    keep.append(mem)
            self._members = keep
            Y = Y[~dominated]
        x = x.copy()
        y = y.copy()
        x.setflags(write=False)
        y.setflags(write=False)
        self._members.append(ArchiveMember(x, y, self._next_order))
        self._next_order += 1
        self._Y = np.vstack([Y, y[None, :]])
        return InsertionReport(accepted=True, evicted=evicted)

    def objective_set(self) -> set[tuple[float, ...]]:
        return {tuple(row) for row in self._Y.tolist()}


def archive_insert(archive: ParetoArchive, x, y) -> InsertionReport:
    return archive.insert(x, y)


def nondominated_mask(Y) -> np.ndarray:
    """Boolean mask of rows of ``Y`` that are neither dominated by nor equal to an
    earlier-or-other row; among duplicates only the first occurrence survives."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or len(Y) == 0:
        raise DomainError("expected a non-empty (k, m) array of objective vectors")
    k, m = Y.shape
    if m == 1:
        mask = np.zeros(k, dtype=bool)
        mask[int(np.argmin(Y[:, 0]))] = True
        return mask
    # lexicographic order; earlier rows can never be dominated by later ones
    order = np.lexsort(tuple(Y[:, j] for j in range(m - 1, -1, -1)))
    # np.lexsort is stable, so among exact duplicates the lowest input index comes first
    S = Y[order]
    keep_sorted = np.zeros(k, dtype=bool)
    if m == 2:
        prev_min = np.minimum.accumulate(S[:, 1])
        keep_sorted[0] = True
        keep_sorted[1:] = S[1:, 1] < prev_min[:-1]
    else:
        front = np.empty((0, m))
        for i in range(k):
            s = S[i]
            if len(front) and np.any(np.all(front <= s, axis=1)):
                continue
            keep_sorted[i] = True
            front = np.vstack([front, s])
    mask = np.zeros(k, dtype=bool)
    mask[order[keep_sorted]] = True
    return mask


def nondominated_filter(points: Sequence[tuple]) -> ParetoArchive:
    """Build an archive from ``(x, y)`` pairs keeping exactly the non-dominated ones."""
    points = list(points)
    if not points:
        raise DomainError("nondominated_filter needs at least one point")
    m = np.asarray(points[0][1]).size
    Y = np.vstack([as_vector(y, dim=m, name="objective vector") for _, y in points])
    mask = nondominated_mask(Y)
    archive = ParetoArchive(m)
    for (x, y), keep in zip(points, mask):
        if keep:
            archive.insert(x, y)
    return archive


# -- epsilon indicator -----------------------------------------------------

def _as_point_matrix(A, name: str) -> np.ndarray:
    if isinstance(A, ParetoArchive):
        A = A.objectives
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2 or A.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty set of objective vectors")
    return A


def epsilon_indicator(A, B) -> float:
    """Additive epsilon indicator I(A, B) = max_b min_a max_j (a_j - b_j).

    The smallest uniform translation that lets every vector of ``B`` be weakly
    dominated by some vector of ``A``. May be negative.
    """
    A = _as_point_matrix(A, "A")
    B = _as_point_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise DomainError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    # chunk over B so memory stays bounded for large reference sets
    chunk = max(1, 2_000_000 // max(1, A.size))
    worst = -np.inf
    for start in range(0, len(B), chunk):
        Bc = B[start:start + chunk]
        diff = A[None, :, :] - Bc[:, None, :]          # (|Bc|, |A|, m)
        per_b = diff.max(axis=2).min(axis=1)
        worst = max(worst, float(per_b.max()))
    return worst


@dataclass
class ReferenceSet:
    """Mutually non-dominated stand-in for the Pareto front.

    ``resolution`` upper-bounds I(R, true front); it is the tolerance that
    separates sampling error from a real bound violation.
    """

    points: np.ndarray
    provenance: str = "unspecified"
    resolution: float = 0.0

    def __post_init__(self):
        self.points = _as_point_matrix(self.points, "reference set")

    def __len__(self):
        return len(self.points)

    @property
    def m(self) -> int:
        return int(self.points.shape[1])


@dataclass
class ClampLog:
    """Counts clamps of negative unary indicator values."""

    count: int = 0
    most_negative: float = 0.0

    def record(self, value: float) -> None:
        self.count += 1
        self.most_negative = min(self.most_negative, value)


def unary_epsilon(A, R: ReferenceSet | np.ndarray, clamp_log: ClampLog | None = None) -> float:
    """I(A, R) against a reference set; negative values are clamped to zero and logged."""
    pts = R.points if isinstance(R, ReferenceSet) else R
    value = epsilon_indicator(A, pts)
    if value < 0.0:
        logger.info("unary epsilon %.3e < 0 against sampled reference; clamped to 0", value)
        if clamp_log is not None:
            clamp_log.record(value)
        return 0.0
    return value


class IncrementalEpsilon:
    """Tracks I(A_k, R) as points are appended to A one at a time.

    Keeps min_a max_j (a_j - r_j) for every reference point r. Points that end up
    dominated never lower that minimum below what their dominator reaches, so
    feeding every evaluated point gives the same value as feeding the
    non-dominated subset.
    """

    def __init__(self, R: ReferenceSet | np.ndarray):
        self.R = R.points if isinstance(R, ReferenceSet) else _as_point_matrix(R, "R")
        self._cols = [np.ascontiguousarray(self.R[:, j]) for j in range(self.R.shape[1])]
        self._best = np.full(len(self.R), np.inf)
        self._buf = np.empty(len(self.R))
        self._tmp = np.empty(len(self.R))

    def add(self, y) -> float:
        y = np.asarray(y, dtype=np.float64)
        buf, tmp = self._buf, self._tmp
        np.subtract(y[0], self._cols[0], out=buf)
        for j in range(1, len(self._cols)):
            np.subtract(y[j], self._cols[j], out=tmp)
            np.maximum(buf, tmp, out=buf)
        np.minimum(self._best, buf, out=self._best)
        return self.value

    @property
    def value(self) -> float:
        return float(self._best.max())


def indicator_series(Y: np.ndarray, R: ReferenceSet | np.ndarray, clamp_log: ClampLog | None = None) -> np.ndarray:
    """Clamped unary epsilon of the first k rows of ``Y`` for k = 1..len(Y)."""
    inc = IncrementalEpsilon(R)
    out = np.empty(len(Y))
    for k, y in enumerate(np.asarray(Y, dtype=np.float64)):
        v = inc.add(y)
        if v < 0.0:
            if clamp_log is not None:
                clamp_log.record(v)
            v = 0.0
        out[k] = v
    return out


def pairwise_nondominated(Y: Iterable) -> bool:
    """O(k^2) check that no row dominates or equals another."""
    Y = np.asarray(list(Y), dtype=np.float64)
    for i in range(len(Y)):
        for k in range(len(Y)):
            if i != k and weakly_dominates(Y[i], Y[k]):
                return False
    return True
