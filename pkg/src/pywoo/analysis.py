"""Regret, indicator bounds and numerical smoothness estimates for WOO runs.

The finite-time bound needs a decreasing sequence delta(h), a near-optimality
dimension d and a packing constant C. None of them has a closed form for the
shipped problems, so they are estimated here on the same deterministic
partition WOO uses:

* delta(h) is the largest gap g - g* over grid points inside the depth-h cell(s)
  holding a global minimizer (a running minimum keeps it non-increasing);
* N(h) counts depth-h cells whose representative is within delta(h) of g*;
* d is the smallest value on a 0.1 grid for which N(h) * delta(h)^d stays
  bounded, and C is the smallest constant with N(h) <= C delta(h)^-d.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import MultiObjectiveProblem, grid_argmin, grid_points, grid_shape
from .core import INF, Box, ConfigError, DomainError
from .pareto import ClampLog, ReferenceSet, indicator_series, unary_epsilon
from .scalarization import TchebycheffScalarizer, lipschitz_bound
from .woo import HmaxSchedule, RunTrace

logger = logging.getLogger(__name__)

MAX_CANDIDATE_CELLS = 27
MAX_COUNTED_CELLS = 3 ** 12


@dataclass
class SmoothnessModel:
    delta: np.ndarray
    near_opt_dim: float = 0.0
    packing_constant: float = 1.0
    provenance: str = "analytic"
    g_star: float = 0.0
    counts: np.ndarray | None = None
    extrapolations: int = field(default=0, compare=False)

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=np.float64)
        if self.delta.ndim != 1 or self.delta.size == 0:
            raise ConfigError("delta must be a non-empty sequence")
        if np.any(self.delta < 0) or np.any(np.diff(self.delta) > 0):
            raise ConfigError("delta must be non-negative and non-increasing")
        if not (math.isfinite(self.near_opt_dim) and math.isfinite(self.packing_constant)):
            raise ConfigError("d and C must be finite")

    @property
    def max_depth(self) -> int:
        return int(self.delta.size - 1)

    def delta_at(self, h: int) -> float:
        """delta(h), extended past the estimated depths by the last observed ratio."""
        if h <= self.max_depth:
            return float(self.delta[h])
        H = self.max_depth
        if H == 0 or self.delta[H - 1] == 0.0:
            ratio = 0.0
        else:
            ratio = float(self.delta[H] / self.delta[H - 1])
        ratio = min(max(ratio, 1e-12), 1.0 - 1e-12)
        self.extrapolations += 1
        logger.debug("extrapolating delta to depth %d with ratio %.4g", h, ratio)
        return float(self.delta[H] * ratio ** (h - H))


# -- regret and per-iteration bounds ------------------------------------------

def indicator_per_iteration(trace: RunTrace, R: ReferenceSet, clamp_log: ClampLog | None = None) -> np.ndarray:
    """Unary epsilon of Y^t_* against ``R`` at every recorded iteration."""
    series = indicator_series(trace.Y, R, clamp_log)
    evals = np.array([r.evals for r in trace.records], dtype=int)
    return series[evals - 1] if len(evals) else np.empty(0)


def regret(trace: RunTrace, R: ReferenceSet, offset: float | None,
           clamp_log: ClampLog | None = None) -> np.ndarray:
    """r(t) = I(Y^t_*, R) - offset for each recorded iteration. Not clamped."""
    if offset is None:
        raise ConfigError("regret needs the offset term of the optimal scalarized point")
    r = indicator_per_iteration(trace, R, clamp_log) - offset
    if len(r) and r.min() < 0:
        logger.debug("%s: regret goes negative (min %.3e)", trace.problem, r.min())
    return r


def theorem3_bound(trace: RunTrace, weights=None) -> np.ndarray:
    """max_j (1/w_j) * g(x(t)) per recorded iteration."""
    w = trace.scalarizer.weights if weights is None else np.asarray(weights, dtype=np.float64)
    factor = float(np.max(1.0 / w))
    return factor * np.array([r.g_best for r in trace.records])


def compute_offset(problem: MultiObjectiveProblem, scalarizer: TchebycheffScalarizer,
                   R: ReferenceSet, budget: int = 500_000) -> tuple[float, np.ndarray, float]:
    """Unary epsilon of the image of the grid minimizer of g. Returns (offset, f(x), g(x))."""
    _, y, g = grid_argmin(problem, scalarizer, budget)
    return unary_epsilon(y[None, :], R), y, g


# -- smoothness estimation -----------------------------------------------------

def _split(lower: np.ndarray, upper: np.ndarray, reps: np.ndarray, axis: int, arity: int):
    """Vectorised counterpart of partition.child_geometry for many cells at once."""
    lo = lower[:, axis]
    hi = upper[:, axis]
    step = (hi - lo) / arity
    mid = (arity - 1) / 2.0
    out_lo, out_hi, out_rep = [], [], []
    for k in range(arity):
        c_lo = lower.copy()
        c_hi = upper.copy()
        c_rep = reps.copy()
        c_lo[:, axis] = lo + k * step if k else lo
        c_hi[:, axis] = lo + (k + 1) * step if k + 1 < arity else hi
        c_rep[:, axis] = reps[:, axis] + (k - mid) * step
        out_lo.append(c_lo)
        out_hi.append(c_hi)
        out_rep.append(c_rep)
    # interleave so children of one parent stay adjacent, in ascending order
    stack = lambda parts: np.stack(parts, axis=1).reshape(-1, lower.shape[1])
    return stack(out_lo), stack(out_hi), stack(out_rep)


def _g(problem, scalarizer, X):
    return scalarizer.batch(problem.batch(X))


def _grid_stats(problem, scalarizer, box: Box, budget: int):
    X, _ = grid_points(box, budget)
    G = _g(problem, scalarizer, X)
    if not np.all(np.isfinite(G)):
        raise DomainError(f"{problem.name}: non-finite scalarized values inside {box}")
    grid = G.reshape(grid_shape(budget, box.n))
    modulus = 0.0
    for ax in range(grid.ndim):
        if grid.shape[ax] > 1:
            modulus = max(modulus, float(np.abs(np.diff(grid, axis=ax)).max()))
    return float(G.min()), float(G.max()), modulus


def estimate_delta(problem: MultiObjectiveProblem, scalarizer: TchebycheffScalarizer,
                   arity: int = 3, max_depth: int = 30, grid_budget: int | None = None,
                   oracle_budget: int = 100_000) -> SmoothnessModel:
    """delta(h) for h = 0..max_depth from grids inside the minimizer-holding cells.

    Cells are followed down the same split sequence WOO uses. At each depth the
    children whose grid minimum is within the grid's own resolution of the best
    one are kept, so a minimizer sitting on a cell face is not lost.
    """
    n = problem.n
    if grid_budget is None:
        grid_budget = 101 if n == 1 else 21 ** n
    if round(grid_budget ** (1.0 / n)) < 2:
        raise DomainError(f"grid budget {grid_budget} cannot resolve a minimizer in {n} dimensions")
    if max_depth < 0:
        raise ConfigError("max_depth must be >= 0")
    _, _, g_star = grid_argmin(problem, scalarizer, oracle_budget)

    dom = problem.domain
    cells = [(dom.lower.copy(), dom.upper.copy(), dom.center)]
    stats = [_grid_stats(problem, scalarizer, dom, grid_budget)]
    sup = np.empty(max_depth + 1)
    for h in range(max_depth + 1):
        sup[h] = max(s[1] for s in stats)
        g_star = min(g_star, min(s[0] for s in stats))
        if h == max_depth:
            break
        lo = np.array([c[0] for c in cells])
        hi = np.array([c[1] for c in cells])
        rp = np.array([c[2] for c in cells])
        c_lo, c_hi, c_rep = _split(lo, hi, rp, h % n, arity)
        child_stats = [_grid_stats(problem, scalarizer, Box(a, b), grid_budget) for a, b in zip(c_lo, c_hi)]
        mins = np.array([s[0] for s in child_stats])
        slack = max(s[2] for s in child_stats)
        keep = np.flatnonzero(mins <= mins.min() + slack)
        if len(keep) > MAX_CANDIDATE_CELLS:
            keep = keep[np.argsort(mins[keep], kind="stable")[:MAX_CANDIDATE_CELLS]]
            keep.sort()
        cells = [(c_lo[i], c_hi[i], c_rep[i]) for i in keep]
        stats = [child_stats[i] for i in keep]

    delta = np.minimum.accumulate(np.maximum(sup - g_star, 0.0))
    return SmoothnessModel(delta, provenance=f"estimated(grid={grid_budget}, oracle={oracle_budget})",
                           g_star=float(g_star))


def _cell_scale(domain: Box, arity: int, max_depth: int) -> np.ndarray:
    widths = domain.widths.astype(float).copy()
    out = np.empty(max_depth + 1)
    for h in range(max_depth + 1):
        out[h] = float(widths.max())
        widths[h % domain.n] /= arity
    return out


def count_near_optimal(problem: MultiObjectiveProblem, scalarizer: TchebycheffScalarizer,
                       arity: int, delta: np.ndarray, g_star: float) -> np.ndarray:
    """N(h): depth-h cells whose representative has g <= g* + delta(h).

    With Lipschitz data, subtrees whose representative is too far above the
    threshold to reach it anywhere inside their box are pruned. Without it the
    count is exhaustive and stops once P^h exceeds ``MAX_COUNTED_CELLS``.
    """
    n = problem.n
    L = None
    if problem.lipschitz is not None and scalarizer.p == INF:
        L = lipschitz_bound(problem.lipschitz, scalarizer.weights)
    dom = problem.domain
    counts = []
    for h, dh in enumerate(delta):
        if L is None and arity ** h > MAX_COUNTED_CELLS:
            logger.info("%s: exhaustive cell count stops at depth %d", problem.name, h - 1)
            break
        threshold = g_star + dh
        lo, hi, rp = dom.lower[None, :].copy(), dom.upper[None, :].copy(), dom.center[None, :]
        for level in range(h):
            lo, hi, rp = _split(lo, hi, rp, level % n, arity)
            if L is not None:
                radius = np.maximum(np.abs(rp - lo), np.abs(hi - rp))
                reach = L * np.sqrt((radius ** 2).sum(axis=1))
                alive = _g(problem, scalarizer, rp) - reach <= threshold
                lo, hi, rp = lo[alive], hi[alive], rp[alive]
            if len(rp) > MAX_COUNTED_CELLS:
                raise DomainError(f"{problem.name}: more than {MAX_COUNTED_CELLS} candidate cells at depth {level + 1}")
        counts.append(int(np.count_nonzero(_g(problem, scalarizer, rp) <= threshold)))
    return np.asarray(counts, dtype=np.int64)


def estimate_near_opt_dim(problem: MultiObjectiveProblem, scalarizer: TchebycheffScalarizer,
                          arity: int, delta, max_depth: int | None = None,
                          g_star: float | None = None) -> tuple[float, float]:
    """Fit (d, C) so that N(h) <= C * delta(h)^-d for every counted depth.

    ``delta`` may be a :class:`SmoothnessModel` (its g* is then used) or a plain
    sequence together with ``g_star``.
    """
    if isinstance(delta, SmoothnessModel):
        g_star = delta.g_star if g_star is None else g_star
        delta = delta.delta
    delta = np.asarray(delta, dtype=np.float64)
    if delta.size == 0:
        raise ConfigError("delta is empty")
    if g_star is None:
        raise ConfigError("g_star is required with a plain delta sequence")
    if max_depth is not None:
        delta = delta[:max_depth + 1]
    counts = count_near_optimal(problem, scalarizer, arity, delta, g_star)
    d, C, _ = fit_near_opt_dim(counts, delta[:len(counts)], problem.n,
                               _cell_scale(problem.domain, arity, len(counts) - 1))
    return d, C


def fit_near_opt_dim(counts, delta, n: int, scale=None) -> tuple[float, float, np.ndarray]:
    """Smallest d in {0, 0.1, ..., n} keeping N(h) delta(h)^d bounded, then the smallest C.

    Bounded means the deeper half of the depths never exceeds the maximum over
    the shallower half. Depths where delta vanishes use ``scale`` (the cell width)
    instead, which is what a flat function needs. Returns (d, C, log residuals).
    """
    counts = np.asarray(counts, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if counts.size == 0:
        raise ConfigError("no cell counts to fit")
    eff = delta.copy()
    if scale is not None:
        zero = eff <= 0.0
        eff[zero] = np.asarray(scale, dtype=np.float64)[zero]
    eff = np.maximum(eff, np.finfo(float).tiny)
    split = max(1, len(counts) // 2)
    chosen = None
    for d in np.round(np.arange(0.0, n + 1e-9, 0.1), 10):
        c = counts * eff ** d
        if len(c) < 2 or c[split:].max() <= c[:split].max() * (1.0 + 1e-9):
            chosen = float(d)
            break
    if chosen is None:
        chosen = float(n)
        logger.info("no d below n keeps N(h) delta(h)^d bounded; using d = n = %d", n)
    C = float(max(1.0, (counts * eff ** chosen).max()))
    residuals = np.log(np.maximum(counts, 1.0)) - np.log(C * eff ** (-chosen))
    logger.debug("near-optimality fit d=%.1f C=%.4g residuals=%s", chosen, C, np.round(residuals, 3))
    return chosen, C, residuals


def estimate_smoothness(problem: MultiObjectiveProblem, scalarizer: TchebycheffScalarizer,
                        arity: int = 3, max_depth: int = 30, grid_budget: int | None = None,
                        oracle_budget: int = 100_000) -> SmoothnessModel:
    """delta, d and C in one go."""
    model = estimate_delta(problem, scalarizer, arity, max_depth, grid_budget, oracle_budget)
    counts = count_near_optimal(problem, scalarizer, arity, model.delta, model.g_star)
    d, C, _ = fit_near_opt_dim(counts, model.delta[:len(counts)], problem.n,
                               _cell_scale(problem.domain, arity, len(counts) - 1))
    model.near_opt_dim = d
    model.packing_constant = C
    model.counts = counts
    return model


# -- finite-time bound -----------------------------------------------------------

def h_of_t(model: SmoothnessModel, schedule: HmaxSchedule, t: int) -> int:
    """Smallest h with C * h_max(t) * sum_{l<=h} delta(l)^-d >= t."""
    scale = model.packing_constant * schedule(t)
    d = model.near_opt_dim
    total = 0.0
    h = 0
    while True:
        dl = model.delta_at(h)
        total += math.inf if (dl == 0.0 and d > 0) else dl ** (-d) if d else 1.0
        if scale * total >= t:
            return h
        h += 1


@dataclass
class BoundCurve:
    t: np.ndarray
    h: np.ndarray
    hmax: np.ndarray
    bound: np.ndarray
    offset: float

    @property
    def comparison(self) -> np.ndarray:
        """bound(t) + offset, the curve the indicator is checked against."""
        return self.bound + self.offset


def theorem4_curve(model: SmoothnessModel, weights, schedule: HmaxSchedule,
                   offset: float, horizon: int) -> BoundCurve:
    """max_j (1/w_j) * delta(min(h(t), h_max(t) + 1)) for t = 1..horizon."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    factor = float(np.max(1.0 / np.asarray(weights, dtype=np.float64)))
    ts = np.arange(1, horizon + 1)
    hs = np.empty(horizon, dtype=np.int64)
    hm = np.empty(horizon, dtype=np.int64)
    bound = np.empty(horizon)
    for i, t in enumerate(ts):
        hs[i] = h_of_t(model, schedule, int(t))
        hm[i] = schedule(int(t))
        bound[i] = factor * model.delta_at(int(min(hs[i], hm[i] + 1)))
    return BoundCurve(ts, hs, hm, bound, float(offset))


# -- full report for one run -----------------------------------------------------

@dataclass
class BoundReport:
    """Per-iteration indicator, bounds and the checks derived from them."""

    problem: str
    t: np.ndarray
    evals: np.ndarray
    g_best: np.ndarray
    indicator: np.ndarray
    theorem3: np.ndarray
    bound: np.ndarray
    regret: np.ndarray
    max_depth: np.ndarray
    offset: float
    tolerance: float
    model: SmoothnessModel
    clamps: ClampLog

    @property
    def theorem3_violation(self) -> float:
        return float(np.max(self.indicator - self.theorem3 - self.tolerance, initial=-np.inf))

    @property
    def theorem4_violation(self) -> float:
        """Largest excess of the indicator over bound + offset + tolerance (<= 0 means pass)."""
        return float(np.max(self.regret - self.bound - self.tolerance, initial=-np.inf))

    @property
    def worst_t(self) -> int:
        return int(self.t[int(np.argmax(self.regret - self.bound))]) if len(self.t) else 0

    @property
    def mean_gap(self) -> float:
        """Mean of bound + offset - indicator over t."""
        return float(np.mean(self.bound + self.offset - self.indicator))

    @property
    def passed(self) -> bool:
        return self.theorem4_violation <= 0.0 and self.theorem3_violation <= 0.0


def bound_report(trace: RunTrace, problem: MultiObjectiveProblem, R: ReferenceSet,
                 offset: float, model: SmoothnessModel) -> BoundReport:
    clamps = ClampLog()
    ind = indicator_per_iteration(trace, R, clamps)
    curve = theorem4_curve(model, trace.scalarizer.weights, trace.config.schedule, offset, max(trace.iterations, 1))
    t = np.array([r.t for r in trace.records], dtype=np.int64)
    bound = curve.bound[t - 1] if len(t) else np.empty(0)
    return BoundReport(
        problem=problem.name, t=t,
        evals=np.array([r.evals for r in trace.records], dtype=np.int64),
        g_best=np.array([r.g_best for r in trace.records]),
        indicator=ind, theorem3=theorem3_bound(trace), bound=bound,
        regret=ind - offset,
        max_depth=np.array([r.max_depth for r in trace.records], dtype=np.int64),
        offset=offset, tolerance=max(1e-6, R.resolution), model=model, clamps=clamps,
    )
