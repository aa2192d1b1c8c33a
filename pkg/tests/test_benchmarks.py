import dataclasses
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from istratde.benchmarks import BOXES, FunctionId, make_problem, problem_from_record, round_reported
from istratde.errors import DimensionMismatch, UnsupportedDimension

FUNCS = list(FunctionId)


def _plain(fid, dim):
    """Problem with zero shift and no rotation."""
    p = make_problem(fid, dim, 0)
    return dataclasses.replace(p, shift=np.zeros(dim))


def test_sphere_hand_value():
    assert _plain("sphere", 2).evaluate([3.0, 4.0]) == 25.0


def test_rastrigin_hand_value():
    assert _plain("rastrigin", 2).evaluate([0.5, 0.5]) == pytest.approx(40.5, abs=1e-12)


def test_textbook_forms_away_from_optimum():
    x = np.array([0.3, -1.2, 2.5])
    d = 3
    ack = -20 * math.exp(-0.2 * math.sqrt((x**2).sum() / d)) - math.exp(np.cos(2 * np.pi * x).sum() / d) + 20 + math.e
    assert _plain("ackley", 3).evaluate(x) == pytest.approx(ack, rel=1e-12)
    grw = (x**2).sum() / 4000 - np.prod(np.cos(x / np.sqrt(np.arange(1, 4)))) + 1
    assert _plain("griewank", 3).evaluate(x) == pytest.approx(grw, rel=1e-12)
    k = 0.5 * np.arange(1, 4)
    zak = (x**2).sum() + (k * x).sum() ** 2 + (k * x).sum() ** 4
    assert _plain("zakharov", 3).evaluate(x) == pytest.approx(zak, rel=1e-12)
    # Rosenbrock and Levy carry a +1 offset so the origin maps to the textbook optimum (1, ..., 1)
    y = x + 1
    ros = sum(100 * (y[i + 1] - y[i] ** 2) ** 2 + (y[i] - 1) ** 2 for i in range(2))
    assert _plain("rosenbrock", 3).evaluate(x) == pytest.approx(ros, rel=1e-12)
    w = 1 + (y - 1) / 4
    lev = (
        math.sin(math.pi * w[0]) ** 2
        + sum((w[i] - 1) ** 2 * (1 + 10 * math.sin(math.pi * w[i] + 1) ** 2) for i in range(2))
        + (w[2] - 1) ** 2 * (1 + math.sin(2 * math.pi * w[2]) ** 2)
    )
    assert _plain("levy", 3).evaluate(x) == pytest.approx(lev, rel=1e-12)


def test_schwefel_textbook_form_inside_box():
    x = np.array([10.0, -50.0])
    z = x + 420.9687462275036
    ref = 418.9828872724338 * 2 - (z * np.sin(np.sqrt(np.abs(z)))).sum()
    assert _plain("schwefel", 2).evaluate(x) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("fid", FUNCS)
@pytest.mark.parametrize("rotate", [False, True])
def test_optimum_at_shift(fid, rotate):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = make_problem(fid, 10, 4, rotate=rotate)
    assert abs(p.evaluate(p.shift)) < 1e-12


def test_ackley_origin():
    assert abs(_plain("ackley", 7).evaluate(np.zeros(7))) < 1e-12


@pytest.mark.parametrize("fid", FUNCS)
def test_shift_in_central_band(fid):
    lo, hi = BOXES[fid]
    for seed in range(5):
        s = make_problem(fid, 30, seed).shift
        assert np.all(s > lo + 0.1 * (hi - lo)) and np.all(s < hi - 0.1 * (hi - lo))


@pytest.mark.parametrize("dim", [1, 2, 10, 30])
def test_rotation_orthogonal(dim):
    r = make_problem("rastrigin", dim, 7, rotate=True).rotation
    assert np.abs(r.T @ r - np.eye(dim)).max() < 1e-10
    assert abs(abs(np.linalg.det(r)) - 1.0) < 1e-8


def test_deterministic_construction():
    a = make_problem("griewank", 10, 3, rotate=True)
    b = make_problem("griewank", 10, 3, rotate=True)
    assert a == b
    assert a != make_problem("griewank", 10, 4, rotate=True)


def test_record_round_trip():
    p = make_problem("levy", 5, 12, rotate=True)
    assert problem_from_record(p.record()) == p


def test_schwefel_rotation_warns():
    with pytest.warns(UserWarning):
        make_problem("schwefel", 4, 0, rotate=True)


def test_errors():
    with pytest.raises(UnsupportedDimension):
        make_problem("sphere", 0)
    with pytest.raises(DimensionMismatch):
        make_problem("sphere", 3).evaluate(np.zeros(4))


@pytest.mark.parametrize("fid", FUNCS)
def test_non_negative_on_box(fid):
    p = make_problem(fid, 10, 1)
    x = np.random.default_rng(0).uniform(p.lb, p.ub, size=(5000, 10))
    assert np.all(p.evaluate(x) >= 0.0)


@settings(max_examples=60, deadline=None)
@given(fid=st.sampled_from(FUNCS), seed=st.integers(0, 10**6), data=st.data())
def test_shift_consistency(fid, seed, data):
    p = make_problem(fid, 4, seed)
    lo, hi = BOXES[fid]
    x = np.array(data.draw(st.lists(st.floats(lo, hi), min_size=4, max_size=4)))
    unshifted = dataclasses.replace(p, shift=np.zeros(4))
    assert p.evaluate(x) == pytest.approx(unshifted.evaluate(x - p.shift), rel=1e-10, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(fid=st.sampled_from(FUNCS), seed=st.integers(0, 10**6))
def test_batch_rows_match_single_rows(fid, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = make_problem(fid, 5, seed, rotate=True)
    x = np.random.default_rng(seed).uniform(p.lb, p.ub, size=(7, 5))
    batch = p.evaluate(x)
    assert all(batch[i] == p.evaluate(x[i]) for i in range(7))


def test_round_reported():
    assert round_reported(9.9e-9) == 0.0
    assert round_reported(1.1e-8) == 1.1e-8
    assert round_reported(0.0) == 0.0
    assert round_reported(5.0 + 5e-9, optimum_value=5.0) == 0.0
