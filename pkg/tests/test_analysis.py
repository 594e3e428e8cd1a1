import math
from types import SimpleNamespace

import numpy as np
import pytest

from pywoo.analysis import (
    SmoothnessModel,
    bound_report,
    compute_offset,
    estimate_delta,
    estimate_near_opt_dim,
    estimate_smoothness,
    fit_near_opt_dim,
    h_of_t,
    indicator_per_iteration,
    regret,
    theorem3_bound,
    theorem4_curve,
)
from pywoo.benchmarks import get_problem, reference_set
from pywoo.core import ConfigError
from pywoo.pareto import ReferenceSet, epsilon_indicator
from pywoo.scalarization import TchebycheffScalarizer
from pywoo.woo import HmaxSchedule, WooConfig, run
from tests.conftest import single_objective

UNIFORM1 = TchebycheffScalarizer.uniform(1)
CONST1 = HmaxSchedule("constant", 1)


def test_delta_of_abs(abs_problem):
    model = estimate_delta(abs_problem, UNIFORM1, max_depth=15)
    expected = 3.0 ** -np.arange(16)
    assert model.delta == pytest.approx(expected, rel=1e-9)
    assert model.g_star == 0.0


def test_delta_at_root_is_range():
    p = single_objective("sq", lambda X: X[:, 0] ** 2 + 0.25, lipschitz=(2.0,))
    model = estimate_delta(p, UNIFORM1, max_depth=6)
    assert model.g_star == pytest.approx(0.25, abs=1e-12)
    assert model.delta[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(model.delta) <= 0)


@pytest.mark.parametrize("name", ["eq7-b", "eq7-f", "fonseca-fleming"])
def test_delta_is_non_increasing(name):
    model = estimate_delta(get_problem(name), TchebycheffScalarizer.uniform(2), max_depth=10)
    assert np.all(np.diff(model.delta) <= 0)
    assert np.all(model.delta >= 0)


def test_near_optimality_dimension_of_abs(abs_problem):
    model = estimate_smoothness(abs_problem, UNIFORM1, max_depth=12)
    assert model.near_opt_dim == 0.0
    assert model.packing_constant == 1.0
    assert model.counts.tolist() == [1] * 13


@pytest.mark.parametrize("n", [1, 2])
def test_constant_function_fills_the_space(n):
    p = single_objective("flat", lambda X: np.ones(len(X)), n=n, lipschitz=(0.0,))
    model = estimate_smoothness(p, UNIFORM1, max_depth=6)
    assert model.near_opt_dim == n
    assert model.counts.tolist() == [3 ** h for h in range(7)]
    assert model.packing_constant >= 1.0


def test_near_opt_dim_from_given_delta(abs_problem):
    d, C = estimate_near_opt_dim(abs_problem, UNIFORM1, 3, 3.0 ** -np.arange(10), g_star=0.0)
    assert (d, C) == (0.0, 1.0)


def test_fit_examples():
    # N(h) = 3^h with delta = 3^-h is exactly d = 1 with C = 1
    counts = 3 ** np.arange(10)
    d, C, _ = fit_near_opt_dim(counts, 3.0 ** -np.arange(10), n=2)
    assert d == pytest.approx(1.0) and C == pytest.approx(1.0)
    d, C, _ = fit_near_opt_dim(np.full(10, 4), 3.0 ** -np.arange(10), n=2)
    assert d == 0.0 and C == 4.0


def test_packing_constant_at_least_one():
    for name in ["eq7-c", "eq7-g"]:
        model = estimate_smoothness(get_problem(name), TchebycheffScalarizer.uniform(2), max_depth=10)
        assert model.packing_constant >= 1.0
        assert 0.0 <= model.near_opt_dim <= get_problem(name).n


def model_of(delta, d=0.0, C=1.0):
    return SmoothnessModel(np.asarray(delta, float), d, C)


@pytest.mark.parametrize("t", [1, 2, 5, 17])
def test_h_of_t_flat_dimension(t):
    assert h_of_t(model_of(3.0 ** -np.arange(30)), CONST1, t) == t - 1


def test_h_of_t_examples():
    assert h_of_t(model_of(3.0 ** -np.arange(30), C=2.0), CONST1, 4) == 1
    assert h_of_t(model_of(3.0 ** -np.arange(30), d=1.0), CONST1, 5) == 2
    # h_max(9) = 3 under the sqrt schedule
    assert h_of_t(model_of(3.0 ** -np.arange(30)), HmaxSchedule(), 9) == 2


def test_model_validation():
    with pytest.raises(ConfigError):
        model_of([1.0, 2.0])
    with pytest.raises(ConfigError):
        model_of([])
    with pytest.raises(ConfigError):
        model_of([1.0], d=math.inf)


def test_delta_extrapolation():
    m = model_of([1.0, 0.5, 0.25])
    assert m.delta_at(2) == 0.25
    assert m.delta_at(4) == pytest.approx(0.0625)
    assert m.extrapolations == 1


def test_theorem4_curve():
    curve = theorem4_curve(model_of(3.0 ** -np.arange(40)), (1.0, 1.0), HmaxSchedule(), 0.1, 50)
    assert curve.bound[0] == 1.0
    assert curve.h[0] == 0
    assert np.all(np.diff(curve.bound) <= 0)
    assert curve.comparison == pytest.approx(curve.bound + 0.1)
    wide = theorem4_curve(model_of(3.0 ** -np.arange(40)), (0.5, 1.0), HmaxSchedule(), 0.0, 5)
    assert wide.bound[0] == 2.0
    with pytest.raises(ConfigError):
        theorem4_curve(model_of([1.0]), (1.0,), HmaxSchedule(), 0.0, 0)


@pytest.mark.parametrize("w, g, expected", [((1, 1), 0.5, 0.5), ((2, 2), 1.0, 0.5), ((0.5, 1), 1.0, 2.0)])
def test_theorem3_bound_examples(w, g, expected):
    fake = SimpleNamespace(records=[SimpleNamespace(g_best=g)], scalarizer=TchebycheffScalarizer(np.array(w, float)))
    assert theorem3_bound(fake).tolist() == [expected]


def test_regret_when_archive_is_reference():
    trace = run(get_problem("eq7-b"), WooConfig(budget=200))
    R = ReferenceSet(trace.archive.objectives, "archive")
    r = regret(trace, R, 0.3)
    assert r[-1] == -0.3
    with pytest.raises(ConfigError):
        regret(trace, R, None)


def test_regret_is_indicator_minus_offset():
    problem = get_problem("eq7-f")
    trace = run(problem, WooConfig(budget=300))
    R = reference_set(problem, 20_000)
    offset, _, _ = compute_offset(problem, trace.scalarizer, R, 20_000)
    ind = indicator_per_iteration(trace, R)
    assert np.array_equal(regret(trace, R, offset), ind - offset)
    # independent check of the per-iteration indicator
    for rec, value in list(zip(trace.records, ind))[::25]:
        assert value == max(0.0, epsilon_indicator(trace.Y[:rec.evals], R.points))


def test_offset_vanishes_when_fronts_collapse():
    problem = get_problem("eq7-d")
    R = reference_set(problem, 100_000)
    offset, y, g = compute_offset(problem, TchebycheffScalarizer.uniform(2), R, 100_000)
    assert offset == pytest.approx(0.0, abs=1e-4)
    assert g == pytest.approx(0.0, abs=1e-4)


def test_bound_report_passes_on_eq7c():
    problem = get_problem("eq7-c")
    trace = run(problem, WooConfig(budget=300))
    R = reference_set(problem, 50_000)
    offset, _, _ = compute_offset(problem, trace.scalarizer, R, 50_000)
    model = estimate_smoothness(problem, trace.scalarizer)
    report = bound_report(trace, problem, R, offset, model)
    assert report.passed
    assert report.tolerance == max(1e-6, R.resolution)
    assert len(report.t) == trace.iterations
    assert np.all(report.indicator <= report.theorem3 + report.tolerance)
