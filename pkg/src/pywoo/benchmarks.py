"""Benchmark problems and sampled reference fronts.

Shipped problems:

* ``eq7-a`` ... ``eq7-h``: bi-objective ``f_j(x) = ||x - c_j||_inf ** alpha_j`` on
  ``[-1, 1]^n`` for the centre pairs (0, 1), (0.21, 0.81), (0.47, 0.61),
  (0.57, 0.57), with n = 1 for a-d and n = 2 for e-h. Centres are constant
  vectors. Exponents default to 1.
* ``fonseca-fleming``: the two-variable Fonseca and Fleming problem on ``[-4, 4]^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .core import Box, ConfigError, as_vector, DomainError, read_point_set, write_point_set
from .pareto import ReferenceSet, nondominated_mask

logger = logging.getLogger(__name__)

BatchEvaluator = Callable[[np.ndarray], np.ndarray]


@dataclass
class MultiObjectiveProblem:
    """m black-box objectives over a box.

    ``batch`` maps a (k, n) array to a (k, m) array. Single points go through
    :meth:`evaluate`. Optional metadata (Lipschitz constants in the
    ||.||_2 -> |.| sense, per-objective minimizers, ideal point, analytic front
    sampler) is used by the analysis tools and the tests.
    """

    name: str
    n: int
    m: int
    domain: Box
    batch: BatchEvaluator
    lipschitz: tuple[float, ...] | None = None
    minimizers: tuple[np.ndarray, ...] | None = None
    ideal: np.ndarray | None = None
    front_sampler: Callable[[int], np.ndarray] | None = None
    description: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain.n != self.n:
            raise ConfigError(f"{self.name}: domain has {self.domain.n} axes, expected n={self.n}")

    def evaluate(self, x) -> np.ndarray:
        x = as_vector(x, self.n, name="x").reshape(1, self.n)
        return self.batch(x)[0]

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)


# -- synthetic family ------------------------------------------------------

CENTER_PAIRS = {
    "a": (0.0, 1.0), "b": (0.21, 0.81), "c": (0.47, 0.61), "d": (0.57, 0.57),
    "e": (0.0, 1.0), "f": (0.21, 0.81), "g": (0.47, 0.61), "h": (0.57, 0.57),
}
INSTANCE_DIMENSION = {k: (1 if k in "abcd" else 2) for k in CENTER_PAIRS}


@dataclass(frozen=True)
class SyntheticInstance:
    center1: float
    center2: float
    n: int = 1
    alpha1: float = 1.0
    alpha2: float = 1.0
    label: str = ""

    @classmethod
    def named(cls, letter: str, alpha: Sequence[float] = (1.0, 1.0)) -> "SyntheticInstance":
        if letter not in CENTER_PAIRS:
            raise ConfigError(f"unknown synthetic instance {letter!r}; expected one of a-h")
        c1, c2 = CENTER_PAIRS[letter]
        return cls(c1, c2, INSTANCE_DIMENSION[letter], float(alpha[0]), float(alpha[1]), letter)


def _power_lipschitz(alpha: float, radius: float) -> float | None:
    # |r1^a - r2^a| <= a * R^(a-1) |r1 - r2| on [0, R] only holds for a >= 1
    if alpha == 1.0:
        return 1.0
    if alpha > 1.0:
        return alpha * radius ** (alpha - 1.0)
    return None


def synthetic(instance: SyntheticInstance) -> MultiObjectiveProblem:
    """``f_j(x) = ||x - c_j||_inf ** alpha_j`` on ``[-1, 1]^n`` with constant-vector centres."""
    n = int(instance.n)
    if n < 1:
        raise ConfigError("dimension must be >= 1")
    a1, a2 = float(instance.alpha1), float(instance.alpha2)
    if a1 <= 0 or a2 <= 0:
        raise ConfigError(f"exponents must be positive, got ({a1}, {a2})")
    c1, c2 = float(instance.center1), float(instance.center2)
    for c in (c1, c2):
        if not -1.0 <= c <= 1.0:
            raise ConfigError(f"centre {c} lies outside [-1, 1]")
    x1 = np.full(n, c1)
    x2 = np.full(n, c2)

    def batch(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        d1 = np.abs(X - x1).max(axis=1)
        d2 = np.abs(X - x2).max(axis=1)
        return np.column_stack([d1 ** a1 if a1 != 1.0 else d1, d2 ** a2 if a2 != 1.0 else d2])

    r1 = max(abs(c1 - 1.0), abs(c1 + 1.0))
    r2 = max(abs(c2 - 1.0), abs(c2 + 1.0))
    L1, L2 = _power_lipschitz(a1, r1), _power_lipschitz(a2, r2)
    lipschitz = None if L1 is None or L2 is None else (L1, L2)
    span = abs(c2 - c1)

    def front(k: int) -> np.ndarray:
        # Pareto set is the diagonal segment between the centres
        s = np.linspace(0.0, span, max(int(k), 1))
        return np.column_stack([s ** a1, (span - s) ** a2])

    label = instance.label or f"{c1}-{c2}-n{n}"
    return MultiObjectiveProblem(
        name=f"eq7-{label}" if instance.label else f"synthetic-{label}",
        n=n, m=2, domain=Box.cube(-1.0, 1.0, n), batch=batch,
        lipschitz=lipschitz, minimizers=(x1, x2), ideal=np.zeros(2),
        front_sampler=front,
        description=f"||x-{c1}||_inf^{a1}, ||x-{c2}||_inf^{a2} on [-1,1]^{n}",
        params={"center1": c1, "center2": c2, "alpha1": a1, "alpha2": a2, "n": n},
    )


# -- Fonseca-Fleming -------------------------------------------------------

_FF_SHIFT = 1.0 / math.sqrt(2.0)
# max of |d/dr (1 - exp(-r^2))| = 2 r exp(-r^2), attained at r = 1/sqrt(2)
_FF_LIPSCHITZ = math.sqrt(2.0) * math.exp(-0.5)


def fonseca_fleming() -> MultiObjectiveProblem:
    def batch(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        f1 = 1.0 - np.exp(-((X - _FF_SHIFT) ** 2).sum(axis=1))
        f2 = 1.0 - np.exp(-((X + _FF_SHIFT) ** 2).sum(axis=1))
        return np.column_stack([f1, f2])

    def front(k: int) -> np.ndarray:
        t = np.linspace(-_FF_SHIFT, _FF_SHIFT, max(int(k), 1))
        return batch(np.column_stack([t, t]))

    return MultiObjectiveProblem(
        name="fonseca-fleming", n=2, m=2, domain=Box.cube(-4.0, 4.0, 2), batch=batch,
        lipschitz=(_FF_LIPSCHITZ, _FF_LIPSCHITZ),
        minimizers=(np.full(2, _FF_SHIFT), np.full(2, -_FF_SHIFT)),
        ideal=np.zeros(2), front_sampler=front,
        description="Fonseca-Fleming, n=2, [-4,4]^2",
    )


# -- registry --------------------------------------------------------------

def problem_names() -> list[str]:
    return [f"eq7-{k}" for k in CENTER_PAIRS] + ["fonseca-fleming"]


def get_problem(name: str, alpha: Sequence[float] = (1.0, 1.0)) -> MultiObjectiveProblem:
    """Look up a registered problem by name (``eq7-a`` ... ``eq7-h``, ``fonseca-fleming``)."""
    if name == "fonseca-fleming":
        return fonseca_fleming()
    if name.startswith("eq7-") and name[4:] in CENTER_PAIRS:
        return synthetic(SyntheticInstance.named(name[4:], alpha))
    raise ConfigError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


# -- sampling --------------------------------------------------------------

def grid_shape(budget: int, n: int) -> tuple[int, ...]:
    """Per-axis point counts, as equal as possible, whose product does not exceed ``budget``."""
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    k = max(1, int(round(budget ** (1.0 / n))))
    while k > 1 and k ** n > budget:
        k -= 1
    while (k + 1) ** n <= budget:
        k += 1
    counts = [k] * n
    for i in range(n):
        trial = counts.copy()
        trial[i] += 1
        if math.prod(trial) <= budget:
            counts = trial
    return tuple(counts)


def grid_points(box: Box, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grid over ``box`` including its faces. Returns (points, spacing per axis)."""
    counts = grid_shape(budget, box.n)
    axes = [np.linspace(lo, hi, k) if k > 1 else np.array([0.5 * (lo + hi)])
            for lo, hi, k in zip(box.lower, box.upper, counts)]
    spacing = np.array([(hi - lo) / (k - 1) if k > 1 else (hi - lo)
                        for lo, hi, k in zip(box.lower, box.upper, counts)])
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh]), spacing


def halton_points(box: Box, budget: int) -> np.ndarray:
    sampler = qmc.Halton(d=box.n, scramble=False)
    u = sampler.random(budget)
    return qmc.scale(u, box.lower, box.upper)


def sample_points(box: Box, budget: int, scheme: str) -> tuple[np.ndarray, float]:
    """Points for a scheme and the covering radius (||.||_2) of the domain by them."""
    if scheme == "grid":
        X, spacing = grid_points(box, budget)
        return X, float(0.5 * np.linalg.norm(spacing))
    if scheme == "low-discrepancy":
        X = halton_points(box, budget)
        # heuristic covering radius of a low-discrepancy set; not a guarantee
        h = box.widths / budget ** (1.0 / box.n)
        return X, float(np.linalg.norm(h))
    raise ConfigError(f"unknown sampling scheme {scheme!r}; expected 'grid' or 'low-discrepancy'")


def _batched(problem: MultiObjectiveProblem, X: np.ndarray, chunk: int = 200_000) -> np.ndarray:
    return np.vstack([problem.batch(X[i:i + chunk]) for i in range(0, len(X), chunk)])


def reference_set(problem: MultiObjectiveProblem, budget: int = 500_000, scheme: str = "grid") -> ReferenceSet:
    """Sample ``problem`` and keep the non-dominated images.

    These evaluations are not charged to any optimization run. The recorded
    resolution bounds how far the sampled set can lag behind the true front
    (max_j L_j times the covering radius); without Lipschitz data it falls back
    to the largest gap between neighbouring front points.
    """
    if budget < 1:
        raise ConfigError("reference budget must be >= 1")
    X, radius = sample_points(problem.domain, budget, scheme)
    Y = _batched(problem, X)
    R = Y[nondominated_mask(Y)]
    R = R[np.lexsort(tuple(R[:, j] for j in range(R.shape[1] - 1, -1, -1)))]
    if problem.lipschitz is not None:
        resolution = float(max(problem.lipschitz) * radius)
    else:
        resolution = _front_gap(R)
    provenance = f"sampled {scheme} budget={budget} points={len(X)}"
    logger.info("%s reference: %d points, resolution %.3e", problem.name, len(R), resolution)
    return ReferenceSet(R, provenance=provenance, resolution=resolution)


def _front_gap(R: np.ndarray) -> float:
    if len(R) < 2:
        return 0.0
    gaps = np.abs(np.diff(R, axis=0)).max(axis=1)
    return float(gaps.max())


def grid_argmin(problem: MultiObjectiveProblem, scalarizer, budget: int = 500_000,
                box: Box | None = None) -> tuple[np.ndarray, np.ndarray, float]:
    """Grid minimizer of the scalarized problem: (x, f(x), g(x))."""
    X, _ = grid_points(box or problem.domain, budget)
    best = (None, None, math.inf)
    chunk = 200_000
    for i in range(0, len(X), chunk):
        Y = problem.batch(X[i:i + chunk])
        G = scalarizer.batch(Y)
        k = int(np.argmin(G))
        if G[k] < best[2]:
            best = (X[i + k].copy(), Y[k].copy(), float(G[k]))
    return best


# -- reference cache -------------------------------------------------------

def reference_cache_path(cache_dir, problem_name: str, scheme: str, budget: int) -> Path:
    return Path(cache_dir) / f"{problem_name}__{scheme}__{budget}.csv"


def cached_reference_set(problem: MultiObjectiveProblem, cache_dir, budget: int = 500_000,
                         scheme: str = "grid") -> ReferenceSet:
    """Load the reference set from ``cache_dir`` or generate and store it."""
    path = reference_cache_path(cache_dir, problem.name, scheme, budget)
    if path.exists():
        meta = _read_header(path)
        pts = read_point_set(path)
        return ReferenceSet(pts, provenance=meta.get("provenance", "cached"),
                            resolution=float(meta.get("resolution", 0.0)))
    ref = reference_set(problem, budget, scheme)
    write_reference_set(path, ref, problem.name)
    return ref


def write_reference_set(path, ref: ReferenceSet, problem_name: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [f"problem: {problem_name}", f"provenance: {ref.provenance}",
              f"resolution: {ref.resolution!r}", f"size: {len(ref)}"]
    return write_point_set(path, ref.points, header=header,
                           columns=[f"y{j + 1}" for j in range(ref.m)])


def _read_header(path) -> dict:
    meta = {}
    for line in Path(path).read_text().splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(":")
        meta[key.strip()] = value.strip()
    return meta


def validate_problem(problem: MultiObjectiveProblem) -> None:
    """Check that known minimizers attain the ideal point."""
    if problem.minimizers is None or problem.ideal is None:
        return
    for j, xj in enumerate(problem.minimizers):
        fj = problem.evaluate(xj)[j]
        if abs(fj - problem.ideal[j]) > 1e-12:
            raise DomainError(f"{problem.name}: f_{j + 1}(x*_{j + 1}) = {fj}, ideal is {problem.ideal[j]}")
