"""Weighted optimistic optimization (WOO) driver.

Each sweep resets the gate value to +inf and walks depths 0..min(tree depth,
h_max(t)). At every depth the best leaf is expanded only if it beats the best
value expanded earlier in the same sweep. The iteration counter t advances once
per depth step, so one sweep spans several values of t.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .benchmarks import MultiObjectiveProblem
from .core import BudgetExhausted, ConfigError, DomainError, EvaluationCounter
from .pareto import ParetoArchive, nondominated_filter
from .partition import PartitionTree, best_leaf_at_depth, expand, make_root
from .scalarization import ScalarizedObjective, TchebycheffScalarizer

logger = logging.getLogger(__name__)

SCHEDULES = ("sqrt", "linear", "constant")
NU_MIN_RESET = "per-sweep"


@dataclass(frozen=True)
class HmaxSchedule:
    """Depth cap per iteration: ``sqrt`` -> ceil(sqrt t), ``linear`` -> ceil(c t), ``constant`` -> H."""

    name: str = "sqrt"
    param: float = 1.0

    def __post_init__(self):
        if self.name not in SCHEDULES:
            raise ConfigError(f"unknown h_max schedule {self.name!r}; expected one of {SCHEDULES}")
        if not self.param > 0:
            raise ConfigError(f"h_max schedule parameter must be positive, got {self.param!r}")
        if self.name == "constant" and int(self.param) != self.param:
            raise ConfigError("constant h_max must be an integer")

    @property
    def bounded(self) -> bool:
        return self.name == "constant"

    def __call__(self, t: int) -> int:
        return hmax_schedule(self.name, self.param, t)


def hmax_schedule(name: str, param: float, t: int) -> int:
    if t < 1:
        raise ConfigError(f"iteration must be >= 1, got {t}")
    if not param > 0:
        raise ConfigError(f"h_max schedule parameter must be positive, got {param!r}")
    if name == "sqrt":
        r = math.isqrt(t)
        return r if r * r == t else r + 1
    if name == "linear":
        return max(1, math.ceil(param * t))
    if name == "constant":
        return int(param)
    raise ConfigError(f"unknown h_max schedule {name!r}")


@dataclass
class WooConfig:
    budget: int = 1000
    partition: int = 3
    schedule: HmaxSchedule = field(default_factory=HmaxSchedule)
    weights: tuple[float, ...] | None = None
    reference_point: tuple[float, ...] | None = None
    reuse_center: bool = True
    problem: str = ""

    def __post_init__(self):
        if int(self.budget) != self.budget or self.budget < 1:
            raise ConfigError(f"budget must be a positive integer, got {self.budget!r}")
        if int(self.partition) != self.partition or self.partition < 2:
            raise ConfigError(f"partition factor must be an integer >= 2, got {self.partition!r}")

    def scalarizer(self, m: int) -> TchebycheffScalarizer:
        w = np.ones(m) if self.weights is None else np.asarray(self.weights, dtype=np.float64)
        z = np.zeros(m) if self.reference_point is None else np.asarray(self.reference_point, dtype=np.float64)
        if w.size != m or z.size != m:
            raise ConfigError(f"weights/reference point must have {m} entries")
        return TchebycheffScalarizer(w, z)

    def echo(self) -> dict:
        d = asdict(self)
        d["schedule"] = f"{self.schedule.name}:{self.schedule.param:g}"
        d["nu_min_reset"] = NU_MIN_RESET
        return d


@dataclass
class IterationRecord:
    t: int
    sweep: int
    depth: int              # depth visited in this step
    evals: int              # v(t) after the step
    g_best: float
    x_best: np.ndarray
    max_depth: int
    expanded_value: float | None   # value of the expanded leaf, None if the gate blocked it

    @property
    def archive_snapshot(self) -> int:
        # Y^t_* is the non-dominated subset of the first `evals` samples
        return self.evals


@dataclass
class RunTrace:
    records: list[IterationRecord]
    X: np.ndarray
    Y: np.ndarray
    G: np.ndarray
    archive: ParetoArchive
    config: WooConfig
    problem: str
    scalarizer: TchebycheffScalarizer
    reused_evaluations: int = 0
    stalled: bool = False
    wall_time: float = 0.0
    tree: PartitionTree | None = None

    @property
    def evaluations(self) -> int:
        return len(self.G)

    @property
    def iterations(self) -> int:
        return len(self.records)

    def best_so_far(self) -> np.ndarray:
        """Running minimum of g over the evaluation order."""
        return np.minimum.accumulate(self.G)

    def metadata(self) -> dict:
        meta = dict(self.config.echo())
        meta.update({
            "problem": self.problem,
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "sweeps": self.records[-1].sweep if self.records else 0,
            "reused_evaluations": self.reused_evaluations,
            "archive_size": len(self.archive),
            "stalled": self.stalled,
            "weights": ",".join(f"{w:g}" for w in self.scalarizer.weights),
            "reference_point": ",".join(f"{z:g}" for z in self.scalarizer.reference),
        })
        return meta


def run(problem: MultiObjectiveProblem, config: WooConfig) -> RunTrace:
    """Optimize the weighted Tchebycheff function of ``problem`` within ``config.budget`` evaluations."""
    started = time.perf_counter()
    scalarizer = config.scalarizer(problem.m)
    counter = EvaluationCounter(config.budget)
    objective = ScalarizedObjective(problem, scalarizer, counter)
    archive = ParetoArchive(problem.m)
    records: list[IterationRecord] = []
    best = {"g": math.inf, "x": None}
    offered = 0

    def absorb():
        # feed newly evaluated points to the archive and the incumbent
        nonlocal offered
        for i in range(offered, objective.evaluations):
            archive.insert(objective.xs[i], objective.ys[i])
            if objective.gs[i] < best["g"]:
                best["g"] = objective.gs[i]
                best["x"] = objective.xs[i]
        offered = objective.evaluations

    tree = make_root(problem.domain, objective, config.partition, config.reuse_center)
    absorb()

    t = 1
    sweep = 0
    stalled = False
    done = counter.exhausted
    while not done:
        sweep += 1
        nu_min = math.inf
        expanded_any = False
        limit = min(tree.depth, config.schedule(t))
        for level in range(limit + 1):
            leaf = best_leaf_at_depth(tree, level)
            expanded_value = None
            if leaf is not None and leaf.value < nu_min:
                nu_min = leaf.value
                expanded_value = leaf.value
                try:
                    expand(tree, leaf, objective)
                    expanded_any = True
                except BudgetExhausted:
                    done = True
                    if tree.partial:
                        expanded_any = True
                    else:
                        expanded_value = None
                absorb()
            if done and expanded_value is None:
                break
            records.append(IterationRecord(t, sweep, level, counter.used, best["g"], best["x"],
                                           tree.max_depth, expanded_value))
            t += 1
            if counter.exhausted:
                done = True
                break
        if not done and not expanded_any and config.schedule.bounded:
            # every leaf sits below the fixed depth cap; nothing more can be expanded
            logger.warning("%s: no expandable leaf under constant h_max=%s; stopping with %d/%d evaluations",
                           problem.name, config.schedule.param, counter.used, counter.budget)
            stalled = True
            done = True

    X = np.vstack(objective.xs)
    Y = np.vstack(objective.ys)
    G = np.asarray(objective.gs)
    return RunTrace(records, X, Y, G, archive, config, problem.name, scalarizer,
                    reused_evaluations=tree.reused, stalled=stalled,
                    wall_time=time.perf_counter() - started, tree=tree)


def best_sample(trace: RunTrace) -> tuple[np.ndarray, float]:
    """Earliest evaluated point with the smallest scalarized value."""
    if trace.evaluations == 0:
        raise DomainError("trace holds no evaluations")
    k = int(np.argmin(trace.G))  # argmin returns the first minimum
    return trace.X[k], float(trace.G[k])


def final_archive_matches(trace: RunTrace) -> bool:
    """The run's archive equals the non-dominated filter of every evaluated point."""
    ref = nondominated_filter(list(zip(trace.X, trace.Y)))
    return ref.objective_set() == trace.archive.objective_set()
