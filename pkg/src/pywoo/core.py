"""Shared numeric vocabulary: vectors, boxes, norms, evaluation budgets, point-set files.

Decision and objective vectors are plain 1-D ``float64`` numpy arrays. The
helpers here validate them once at API boundaries so the inner loops can stay
free of checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DecisionVector = np.ndarray
ObjectiveVector = np.ndarray

INF = math.inf


class DomainError(ValueError):
    """Raised when an argument violates an operation's mathematical domain."""


class ConfigError(ValueError):
    """Raised for invalid configuration values (budgets, schedules, exponents...)."""


class BudgetExhausted(Exception):
    """Signals that the evaluation budget is spent. Not an error for a run."""


def as_vector(values, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Convert ``values`` to a finite 1-D float64 array, optionally checking its length."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name} must not be empty")
    if dim is not None and arr.size != dim:
        raise DomainError(f"{name} has length {arr.size}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries: {arr}")
    return arr


def norm(v: Sequence[float], p: float = 2) -> float:
    """l_p norm for p in {1, 2, inf}.

    >>> norm([3, -4], 2)
    5.0
    >>> norm([3, -4], math.inf)
    4.0
    """
    arr = as_vector(v, name="v")
    a = np.abs(arr)
    if p == 1:
        return float(a.sum())
    if p == 2:
        return math.hypot(*a.tolist())
    if p == INF:
        return float(a.max())
    raise DomainError(f"unsupported norm order {p!r}; expected 1, 2 or inf")


def hadamard(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Element-wise product of two equally long vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"length mismatch: {a.shape} vs {b.shape}")
    return a * b


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box ``[lower, upper]`` in R^n. Zero-width axes are allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower, name="lower")
        hi = as_vector(self.upper, dim=lo.size, name="upper")
        if np.any(lo > hi):
            raise DomainError(f"box has lower > upper: {lo} > {hi}")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, low: float, high: float, n: int) -> "Box":
        return cls(np.full(n, float(low)), np.full(n, float(high)))

    @property
    def n(self) -> int:
        return int(self.lower.size)

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def is_degenerate(self) -> bool:
        return bool(np.any(self.widths <= 0.0))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self):
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


@dataclass
class EvaluationCounter:
    """Counts objective-vector evaluations against a fixed budget."""

    budget: int
    used: int = field(default=0)

    def __post_init__(self):
        if int(self.budget) != self.budget or self.budget < 1:
            raise ConfigError(f"budget must be a positive integer, got {self.budget!r}")
        self.budget = int(self.budget)

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.budget

    def charge(self) -> None:
        if self.used >= self.budget:
            raise BudgetExhausted(f"evaluation budget of {self.budget} exhausted")
        self.used += 1


# -- point-set files -------------------------------------------------------

def format_float(x: float) -> str:
    # 17 significant digits round-trips every float64
    return format(float(x), ".17g")


def write_point_set(path, points, header: Iterable[str] = (), columns: Sequence[str] | None = None) -> Path:
    """Write an (k, d) array of points as CSV. ``header`` lines are emitted as ``#`` comments."""
    path = Path(path)
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    lines = [f"# {h}" for h in header]
    if columns is not None:
        if len(columns) != pts.shape[1]:
            raise DomainError("column count does not match point dimension")
        lines.append("# columns: " + ",".join(columns))
    for row in pts:
        lines.append(",".join(format_float(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_point_set(path) -> np.ndarray:
    """Read a point-set CSV into a (k, d) float64 array. Comment lines are skipped."""
    rows = []
    width = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: cannot parse {line!r}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DomainError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
        if not all(math.isfinite(v) for v in row):
            raise DomainError(f"{path}:{lineno}: non-finite value")
        rows.append(row)
    if not rows:
        raise DomainError(f"{path}: no points found")
    return np.asarray(rows, dtype=np.float64)
