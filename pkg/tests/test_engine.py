import numpy as np
import pytest

from istratde.algorithms import Budget, run_istratde
from istratde.benchmarks import make_problem
from istratde.engine import Lane, counter_uniforms, default_workers, derive_stream, evaluate_population


def _draws(stream, n=1000):
    return stream.uniform(n)


def test_same_triple_same_draws():
    assert np.array_equal(_draws(derive_stream(5, 3, 7)), _draws(derive_stream(5, 3, 7)))


def test_neighbouring_streams_differ():
    base = _draws(derive_stream(5, 3, 7))
    assert not np.array_equal(base, _draws(derive_stream(5, 3, 8)))
    assert not np.array_equal(base, _draws(derive_stream(6, 3, 7)))
    assert not np.array_equal(base, _draws(derive_stream(5, 4, 7)))
    assert not np.array_equal(base, _draws(derive_stream(5, 3, 7).lane(Lane.CROSSOVER)))


def test_draws_in_unit_interval_and_roughly_uniform():
    u = _draws(derive_stream(0, 0, 0), 100_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005
    assert abs(u.var() - 1 / 12) < 0.002


def test_sequential_draws_match_counter_block():
    s = derive_stream(9, 2, 4)
    seq = np.array([s.uniform() for _ in range(5)])
    block = counter_uniforms(9, 2, 4, Lane.INDEX, np.arange(5))
    assert np.array_equal(seq, block)


def test_lane_restarts_at_zero():
    s = derive_stream(1, 1, 1)
    s.uniform(10)
    assert np.array_equal(s.lane(Lane.PBEST).uniform(3), derive_stream(1, 1, 1).lane(Lane.PBEST).uniform(3))


def test_integers_range():
    k = derive_stream(0, 0, 0).integers(7, size=5000)
    assert set(np.unique(k)) == set(range(7))


def test_single_row_batch_matches_evaluate():
    p = make_problem("rastrigin", 6, 1, rotate=True)
    x = np.random.default_rng(0).uniform(-5, 5, size=(1, 6))
    assert evaluate_population(p, x)[0] == p.evaluate(x[0])


@pytest.mark.parametrize("fid", ["rastrigin", "zakharov", "levy"])
def test_worker_count_does_not_change_results(fid):
    p = make_problem(fid, 10, 3, rotate=True)
    x = np.random.default_rng(1).uniform(p.lb, p.ub, size=(1000, 10))
    one = evaluate_population(p, x, 1)
    eight = evaluate_population(p, x, 8)
    assert one.tobytes() == eight.tobytes()
    rows = np.array([p.evaluate(r) for r in x[:50]])
    assert rows.tobytes() == one[:50].tobytes()


def test_empty_batch_rejected():
    p = make_problem("sphere", 3)
    with pytest.raises(ValueError):
        evaluate_population(p, np.empty((0, 3)))


def test_worker_env(monkeypatch):
    monkeypatch.setenv("ISTRATDE_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("ISTRATDE_WORKERS", "junk")
    assert default_workers() == 1


def test_full_run_independent_of_workers():
    p = make_problem("ackley", 5, 0)
    a = run_istratde(p, 300, Budget.generations(8), 42, workers=1)
    b = run_istratde(p, 300, Budget.generations(8), 42, workers=4)
    assert a.population.vectors.tobytes() == b.population.vectors.tobytes()
    assert a.trace.best_so_far == b.trace.best_so_far
