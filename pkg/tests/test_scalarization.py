import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pywoo.benchmarks import fonseca_fleming, get_problem, problem_names
from pywoo.core import BudgetExhausted, ConfigError, DomainError, EvaluationCounter
from pywoo.scalarization import (
    NonFiniteObjective,
    TchebycheffScalarizer,
    lipschitz_bound,
    scalarize,
    scalarized_objective,
)
from tests.conftest import single_objective


@pytest.mark.parametrize("w, y, p, expected", [
    ((1, 1), (3, 1), math.inf, 3.0),
    ((2, 1), (1, 4), math.inf, 4.0),
    ((1, 1), (3, 4), 2, 5.0),
    ((1, 1), (3, 4), 1, 7.0),
])
def test_scalarize_examples(w, y, p, expected):
    s = TchebycheffScalarizer(np.array(w, float), np.zeros(2), p)
    assert scalarize(s, y) == expected
    assert s.batch(np.array([y], float))[0] == expected


def test_scalarize_errors():
    s = TchebycheffScalarizer.uniform(2)
    with pytest.raises(DomainError):
        scalarize(s, (1, 2, 3))
    with pytest.raises(DomainError):
        scalarize(s, (1, math.nan))


def test_weights_must_be_positive():
    with pytest.raises(ConfigError):
        TchebycheffScalarizer(np.array([1.0, 0.0]))
    with pytest.raises(ConfigError):
        TchebycheffScalarizer(np.array([1.0, -1.0]))


def test_absolute_value_below_reference():
    s = TchebycheffScalarizer(np.ones(2), np.array([1.0, 1.0]))
    assert scalarize(s, (0.5, 1.0)) == 0.5


@pytest.mark.parametrize("L, w, expected", [
    ((1, 1), (1, 1), math.sqrt(2)),
    ((5,), (2,), 10.0),
    ((1, 2, 3, 4), (4, 3, 2, 1), 12.0),
])
def test_lipschitz_bound_examples(L, w, expected):
    assert lipschitz_bound(L, w) == pytest.approx(expected, rel=1e-15)


def test_scalarized_objective_eq7a():
    problem = get_problem("eq7-a")
    counter = EvaluationCounter(3)
    g = scalarized_objective(problem, TchebycheffScalarizer.uniform(2), counter)
    assert g([0.0]) == 1.0
    assert g([0.5]) == 0.5
    assert counter.used == 2
    assert [y.tolist() for y in g.ys] == [[0.0, 1.0], [0.5, 0.5]]
    g([1.0])
    with pytest.raises(BudgetExhausted):
        g([0.2])
    assert counter.used == 3 and g.evaluations == 3


def test_reference_point_attains_zero():
    problem = get_problem("eq7-d")
    g = scalarized_objective(problem, TchebycheffScalarizer.uniform(2), EvaluationCounter(1))
    assert g([0.57]) == 0.0


def test_non_finite_objective_is_a_domain_error():
    bad = single_objective("nan", lambda X: np.full(len(X), np.nan))
    g = scalarized_objective(bad, TchebycheffScalarizer.uniform(1), EvaluationCounter(5))
    with pytest.raises(NonFiniteObjective):
        g([0.0])


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        scalarized_objective(get_problem("eq7-a"), TchebycheffScalarizer.uniform(3), EvaluationCounter(1))


@pytest.mark.parametrize("name", problem_names())
@pytest.mark.parametrize("w", [(1.0, 1.0), (2.0, 0.5)])
def test_empirical_lipschitz(name, w, rng):
    problem = get_problem(name)
    s = TchebycheffScalarizer(np.array(w))
    lo, hi = problem.domain.lower, problem.domain.upper
    X1 = lo + (hi - lo) * rng.random((10_000, problem.n))
    X2 = lo + (hi - lo) * rng.random((10_000, problem.n))
    # also near-coincident pairs, where slopes are steepest
    X2[:2000] = np.clip(X1[:2000] + 1e-3 * rng.normal(size=(2000, problem.n)), lo, hi)
    dg = np.abs(s.batch(problem.batch(X1)) - s.batch(problem.batch(X2)))
    dx = np.linalg.norm(X1 - X2, axis=1)
    assert np.all(dg <= lipschitz_bound(problem.lipschitz, s.weights) * dx + 1e-9)


vals = st.floats(min_value=-100, max_value=100, allow_nan=False)
pos = st.floats(min_value=0.01, max_value=100)


@given(st.lists(st.tuples(vals, pos), min_size=1, max_size=5))
def test_nonnegative_and_zero_only_at_reference(pairs):
    y = np.array([p[0] for p in pairs])
    w = np.array([p[1] for p in pairs])
    s = TchebycheffScalarizer(w, np.zeros_like(w))
    g = scalarize(s, y)
    assert g >= 0.0
    assert (g == 0.0) == bool(np.all(y == 0.0))
    assert scalarize(s, np.zeros_like(y)) == 0.0


@given(st.lists(st.tuples(vals, pos), min_size=1, max_size=5), st.floats(min_value=0.1, max_value=10))
def test_weight_scaling(pairs, c):
    y = np.array([p[0] for p in pairs])
    w = np.array([p[1] for p in pairs])
    assert scalarize(TchebycheffScalarizer(c * w), y) == pytest.approx(c * scalarize(TchebycheffScalarizer(w), y), rel=1e-12)


def test_weight_scaling_keeps_argmin(rng):
    Y = rng.random((200, 3))
    w = rng.random(3) + 0.1
    a = int(np.argmin(TchebycheffScalarizer(w).batch(Y)))
    b = int(np.argmin(TchebycheffScalarizer(7.5 * w).batch(Y)))
    assert a == b


@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10), pos), min_size=1, max_size=5))
def test_monotone_in_deviation(triples):
    small = np.array([min(a, b) for a, b, _ in triples])
    large = np.array([max(a, b) for a, b, _ in triples])
    w = np.array([t[2] for t in triples])
    s = TchebycheffScalarizer(w)
    assert scalarize(s, small) <= scalarize(s, large)
