"""Weighted Tchebycheff scalarization and its weighted p-norm relatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .core import INF, ConfigError, DomainError, EvaluationCounter, as_vector

if TYPE_CHECKING:
    from .benchmarks import MultiObjectiveProblem


def weight_vector(weights: Sequence[float]) -> np.ndarray:
    """Validate a weight vector. Zero weights are rejected, not just negative ones."""
    w = as_vector(weights, name="weights")
    if np.any(w <= 0.0):
        raise ConfigError(f"weights must be strictly positive, got {w.tolist()}")
    return w


@dataclass(frozen=True, eq=False)
class TchebycheffScalarizer:
    """g(y) = || w * |y - z| ||_p, with p = inf giving the weighted Tchebycheff function."""

    weights: np.ndarray
    reference: np.ndarray | None = None
    p: float = INF

    def __post_init__(self):
        w = weight_vector(self.weights)
        z = np.zeros_like(w) if self.reference is None else as_vector(self.reference, dim=w.size, name="reference point")
        if self.p not in (1, 2, INF):
            raise ConfigError(f"norm order must be 1, 2 or inf, got {self.p!r}")
        w.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "reference", z)

    @classmethod
    def uniform(cls, m: int, p: float = INF) -> "TchebycheffScalarizer":
        return cls(np.ones(m), np.zeros(m), p)

    @property
    def m(self) -> int:
        return int(self.weights.size)

    @property
    def inverse_weight_factor(self) -> float:
        """max_j 1/w_j, the factor linking g to the epsilon indicator."""
        return float(np.max(1.0 / self.weights))

    def __call__(self, y) -> float:
        return scalarize(self, y)

    def batch(self, Y: np.ndarray) -> np.ndarray:
        """Scalarize each row of a (k, m) array."""
        Y = np.asarray(Y, dtype=np.float64)
        t = self.weights * np.abs(Y - self.reference)
        if self.p == INF:
            return t.max(axis=1)
        if self.p == 1:
            return t.sum(axis=1)
        return np.sqrt((t * t).sum(axis=1))


def scalarize(s: TchebycheffScalarizer, y) -> float:
    y = as_vector(y, dim=s.m, name="objective vector")
    t = s.weights * np.abs(y - s.reference)
    if s.p == INF:
        return float(t.max())
    if s.p == 1:
        return float(t.sum())
    return float(math.sqrt(float(np.dot(t, t))))


def lipschitz_bound(lipschitz: Sequence[float], weights: Sequence[float]) -> float:
    """Lipschitz constant of the Tchebycheff function: sqrt(m) * max_j w_j L_j."""
    L = np.asarray(lipschitz, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if L.shape != w.shape:
        raise DomainError(f"length mismatch: {L.shape} vs {w.shape}")
    if np.any(L < 0):
        raise DomainError("Lipschitz constants must be non-negative")
    return float(math.sqrt(L.size) * np.max(w * L))


class NonFiniteObjective(DomainError):
    """The black box returned NaN or infinity."""


@dataclass
class ScalarizedObjective:
    """Single-objective view x -> g(f(x)) of a problem.

    Every call charges one evaluation to ``counter`` and appends the sample to the
    log, so the raw objective vectors stay available for the Pareto archive.
    """

    problem: "MultiObjectiveProblem"
    scalarizer: TchebycheffScalarizer
    counter: EvaluationCounter
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    gs: list = field(default_factory=list)

    def __post_init__(self):
        if self.scalarizer.m != self.problem.m:
            raise DomainError(f"scalarizer has {self.scalarizer.m} weights, problem has {self.problem.m} objectives")

    def __call__(self, x) -> float:
        self.counter.charge()
        x = np.array(x, dtype=np.float64)
        y = np.asarray(self.problem.evaluate(x), dtype=np.float64)
        if y.shape != (self.problem.m,) or not np.all(np.isfinite(y)):
            raise NonFiniteObjective(f"{self.problem.name}: objective at x={x.tolist()} is {y.tolist()}")
        g = scalarize(self.scalarizer, y)
        self.xs.append(x)
        self.ys.append(y)
        self.gs.append(g)
        return g

    @property
    def evaluations(self) -> int:
        return len(self.gs)


def scalarized_objective(problem: "MultiObjectiveProblem", s: TchebycheffScalarizer, counter: EvaluationCounter) -> ScalarizedObjective:
    return ScalarizedObjective(problem, s, counter)
