"""Command-line front end.

Subcommands::

    pywoo run --config run.cfg [--out DIR] [--budget N]
    pywoo validate [--instances a,b,...] [--budget N] [--out DIR] [--parallel N]
    pywoo indicator A.csv B.csv
    pywoo reference PROBLEM [--scheme grid] [--budget N] [--out DIR]
    pywoo list-problems

Exit codes: 0 success, 1 runtime failure or bound violation, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import BoundReport, bound_report, compute_offset, estimate_smoothness
from .benchmarks import CENTER_PAIRS, cached_reference_set, get_problem, problem_names
from .core import ConfigError, DomainError, format_float, read_point_set, write_point_set
from .pareto import epsilon_indicator
from .woo import HmaxSchedule, RunTrace, WooConfig, run

logger = logging.getLogger("pywoo")

TRACE_COLUMNS = ("t", "evals", "g_best", "indicator", "bound", "regret", "max_depth")
SUMMARY_COLUMNS = ("instance", "problem", "passed", "max_violation", "worst_t", "theorem3_max_violation",
                   "mean_gap", "offset", "tolerance", "near_opt_dim", "packing_constant",
                   "evaluations", "iterations", "final_indicator", "final_g_best")


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    problem: str = "eq7-a"
    budget: int = 1000
    partition: int = 3
    hmax_schedule: str = "sqrt"
    hmax_param: float = 1.0
    weights: tuple[float, ...] | None = None
    reference_point: tuple[float, ...] | None = None
    reuse_center: bool = True
    alpha: tuple[float, ...] = (1.0, 1.0)
    reference_scheme: str = "grid"
    reference_budget: int = 500_000
    offset_budget: int = 500_000
    smoothness_depth: int = 30
    out_dir: str = "results"
    deterministic: bool = True

    def woo_config(self) -> WooConfig:
        return WooConfig(budget=self.budget, partition=self.partition,
                         schedule=HmaxSchedule(self.hmax_schedule, self.hmax_param),
                         weights=self.weights, reference_point=self.reference_point,
                         reuse_center=self.reuse_center, problem=self.problem)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


_PARSERS = {
    "problem": str, "budget": int, "partition": int, "hmax_schedule": str, "hmax_param": float,
    "weights": _parse_floats, "reference_point": _parse_floats, "reuse_center": _parse_bool,
    "alpha": _parse_floats, "reference_scheme": str, "reference_budget": int, "offset_budget": int,
    "smoothness_depth": int, "out_dir": str, "deterministic": _parse_bool,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines. ``#`` starts a comment; unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    cfg = ExperimentConfig(**values)
    if not cfg.deterministic:
        raise ConfigError("deterministic = false is not supported; runs are always deterministic")
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# -- one experiment ------------------------------------------------------------

@dataclass
class ExperimentResult:
    trace: RunTrace
    report: BoundReport
    runtime: float
    meta: dict = field(default_factory=dict)


def run_experiment(cfg: ExperimentConfig, cache_dir) -> ExperimentResult:
    started = time.perf_counter()
    problem = get_problem(cfg.problem, cfg.alpha)
    woo_cfg = cfg.woo_config()
    trace = run(problem, woo_cfg)
    R = cached_reference_set(problem, cache_dir, cfg.reference_budget, cfg.reference_scheme)
    offset, _, _ = compute_offset(problem, trace.scalarizer, R, cfg.offset_budget)
    model = estimate_smoothness(problem, trace.scalarizer, cfg.partition, cfg.smoothness_depth)
    report = bound_report(trace, problem, R, offset, model)
    meta = trace.metadata()
    meta.update({
        "alpha": ",".join(f"{a:g}" for a in cfg.alpha) if cfg.problem.startswith("eq7-") else "n/a",
        "reference": R.provenance, "reference_size": len(R), "reference_resolution": format_float(R.resolution),
        "offset": format_float(offset), "offset_budget": cfg.offset_budget,
        "g_star": format_float(model.g_star), "near_opt_dim": f"{model.near_opt_dim:g}",
        "packing_constant": format_float(model.packing_constant), "smoothness": model.provenance,
        "delta_extrapolations": model.extrapolations, "indicator_clamps": report.clamps.count,
        "tolerance": format_float(report.tolerance),
        "theorem3_max_violation": format_float(report.theorem3_violation),
        "theorem4_max_violation": format_float(report.theorem4_violation),
    })
    return ExperimentResult(trace, report, time.perf_counter() - started, meta)


def write_trace_csv(path, report: BoundReport) -> Path:
    lines = [",".join(TRACE_COLUMNS)]
    for i in range(len(report.t)):
        lines.append(",".join([
            str(int(report.t[i])), str(int(report.evals[i])), format_float(report.g_best[i]),
            format_float(report.indicator[i]), format_float(report.bound[i]),
            format_float(report.regret[i]), str(int(report.max_depth[i])),
        ]))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_trace_csv(path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]]).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_archive_csv(path, trace: RunTrace) -> Path:
    n = trace.X.shape[1]
    m = trace.Y.shape[1]
    pts = np.hstack([trace.archive.decisions, trace.archive.objectives]) if len(trace.archive) else np.empty((0, n + m))
    cols = [f"x{i + 1}" for i in range(n)] + [f"y{j + 1}" for j in range(m)]
    return write_point_set(path, pts, header=[f"problem: {trace.problem}", f"archive size: {len(trace.archive)}"],
                           columns=cols)


def write_metadata(path, meta: dict) -> Path:
    path = Path(path)
    path.write_text("".join(f"{k} = {v}\n" for k, v in meta.items()))
    return path


# -- subcommands ---------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.budget is not None:
        cfg.budget = args.budget
    get_problem(cfg.problem, cfg.alpha)  # fail fast on unknown names
    out = Path(args.out or cfg.out_dir)
    _ensure_dir(out)
    cfg.woo_config()
    result = run_experiment(cfg, out / "reference")
    write_trace_csv(out / f"{cfg.problem}_trace.csv", result.report)
    write_archive_csv(out / f"{cfg.problem}_archive.csv", result.trace)
    write_metadata(out / f"{cfg.problem}_metadata.txt", result.meta)
    rep = result.report
    print(f"{cfg.problem}: {result.trace.evaluations} evaluations, {result.trace.iterations} iterations, "
          f"g_best={rep.g_best[-1]:.6g}, indicator={rep.indicator[-1]:.6g}, archive={len(result.trace.archive)}")
    return 0


def _validate_instance(job) -> tuple[str, dict, list[str], float]:
    letter, cfg, out = job
    result = run_experiment(cfg, Path(out) / "reference")
    write_trace_csv(Path(out) / f"eq7-{letter}.csv", result.report)
    rep = result.report
    row = {
        "instance": letter, "problem": cfg.problem, "passed": int(rep.passed),
        "max_violation": format_float(max(rep.theorem4_violation, 0.0)),
        "worst_t": rep.worst_t,
        "theorem3_max_violation": format_float(max(rep.theorem3_violation, 0.0)),
        "mean_gap": format_float(rep.mean_gap), "offset": format_float(rep.offset),
        "tolerance": format_float(rep.tolerance), "near_opt_dim": f"{rep.model.near_opt_dim:g}",
        "packing_constant": format_float(rep.model.packing_constant),
        "evaluations": result.trace.evaluations, "iterations": result.trace.iterations,
        "final_indicator": format_float(rep.indicator[-1]) if len(rep.t) else "nan",
        "final_g_best": format_float(rep.g_best[-1]) if len(rep.t) else "nan",
    }
    failures = []
    if not rep.passed:
        bad = rep.regret - rep.bound - rep.tolerance
        for i in np.flatnonzero(bad > 0)[:5]:
            failures.append(f"eq7-{letter} t={int(rep.t[i])}: indicator {rep.indicator[i]:.6g} > "
                            f"bound+offset {rep.bound[i] + rep.offset:.6g} (+tol {rep.tolerance:.1e})")
    return letter, row, failures, result.runtime


def cmd_validate(args) -> int:
    letters = [tok.strip() for tok in (args.instances or "").split(",") if tok.strip()]
    if not letters:
        raise UsageError("no instances given")
    unknown = [x for x in letters if x not in CENTER_PAIRS]
    if unknown:
        raise UsageError(f"unknown instance(s): {', '.join(unknown)}; expected letters a-h")
    out = Path(args.out)
    _ensure_dir(out)
    jobs = []
    for letter in letters:
        cfg = ExperimentConfig(problem=f"eq7-{letter}", budget=args.budget,
                               reference_budget=args.reference_budget, offset_budget=args.reference_budget)
        cfg.woo_config()
        jobs.append((letter, cfg, str(out)))
    if args.parallel > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(_validate_instance, jobs))
    else:
        results = [_validate_instance(job) for job in jobs]

    lines = [",".join(SUMMARY_COLUMNS)]
    for _, row, _, _ in results:
        lines.append(",".join(str(row[c]) for c in SUMMARY_COLUMNS))
    (out / "summary.csv").write_text("\n".join(lines) + "\n")
    # wall-clock times live outside the CSVs so reruns stay byte-identical
    (out / "timing.txt").write_text("".join(f"eq7-{l} = {rt:.3f}s\n" for l, _, _, rt in results))

    print(f"{'instance':<9}{'pass':<6}{'max violation':>15}{'mean gap':>12}{'runtime':>10}")
    all_pass = True
    for letter, row, failures, runtime in results:
        all_pass &= bool(row["passed"])
        print(f"eq7-{letter:<5}{'yes' if row['passed'] else 'NO':<6}{float(row['max_violation']):>15.3e}"
              f"{float(row['mean_gap']):>12.4f}{runtime:>9.2f}s")
        for msg in failures:
            print("  violation:", msg)
    gaps = {row["instance"]: float(row["mean_gap"]) for _, row, _, _ in results}
    for hi_, lo_ in (("a", "d"), ("e", "h")):
        if hi_ in gaps and lo_ in gaps:
            verdict = "holds" if gaps[hi_] > gaps[lo_] else "does not hold"
            print(f"tightness: mean gap eq7-{hi_} > eq7-{lo_} {verdict}")
    return 0 if all_pass else 1


def cmd_indicator(args) -> int:
    A = read_point_set(args.a)
    B = read_point_set(args.b)
    if A.shape[1] != B.shape[1]:
        raise UsageError(f"dimension mismatch: {args.a} has {A.shape[1]} columns, {args.b} has {B.shape[1]}")
    print(f"{epsilon_indicator(A, B):.12g}")
    return 0


def cmd_reference(args) -> int:
    problem = get_problem(args.problem)
    out = Path(args.out)
    _ensure_dir(out)
    ref = cached_reference_set(problem, out, args.budget, args.scheme)
    print(f"{problem.name}: {len(ref)} reference points ({ref.provenance}, resolution {ref.resolution:.3e})")
    return 0


def cmd_list(args) -> int:
    for name in problem_names():
        p = get_problem(name)
        print(f"{name:<17} n={p.n} m={p.m}  {p.description}")
    return 0


def _ensure_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RuntimeError(f"cannot create output directory {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pywoo", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="optimize one problem and write trace, archive and metadata")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check the finite-time bound on the synthetic instances")
    p.add_argument("--instances", default=",".join(CENTER_PAIRS))
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--reference-budget", type=int, default=500_000)
    p.add_argument("--out", default="validation")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("indicator", help="additive epsilon indicator I(A, B) of two point-set files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_indicator)

    p = sub.add_parser("reference", help="generate (or reuse) a cached reference set")
    p.add_argument("problem")
    p.add_argument("--scheme", default="grid", choices=("grid", "low-discrepancy"))
    p.add_argument("--budget", type=int, default=500_000)
    p.add_argument("--out", default="reference")
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("list-problems", help="list registered problems")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, DomainError) as exc:
        print(f"pywoo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        logger.debug("runtime failure", exc_info=True)
        print(f"pywoo {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
