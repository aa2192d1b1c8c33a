"""Deterministic parallel substrate: counter-based random streams and batched evaluation.

Every random number used by the optimizers is a pure function of
``(master_seed, generation, individual, lane, counter)``. Nothing depends on
the order in which individuals are processed, so a generation computed with
one vectorized numpy pass, with a thread pool, or with a plain Python loop
over individuals produces the same bits.

The generator is the SplitMix64 output function keyed by a chained mix of the
stream coordinates. It is cheap to vectorize over thousands of streams at
once, which numpy's own bit generators are not.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum

import numpy as np

__all__ = [
    "Lane",
    "RngStream",
    "counter_uniforms",
    "derive_stream",
    "evaluate_population",
    "default_workers",
    "WORKERS_ENV",
]

WORKERS_ENV = "ISTRATDE_WORKERS"

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_DOUBLE_UNIT = 2.0**-53

# rows handed to one worker; fixed so the partition never depends on worker count
EVAL_CHUNK_ROWS = 256


class Lane(IntEnum):
    """Independent sub-streams of a single (generation, individual) stream."""

    INDEX = 0
    PBEST = 1
    CROSSOVER = 2
    INIT_VECTOR = 3
    INIT_STRATEGY = 4
    INIT_PARAMS = 5


def _u64(value) -> np.ndarray:
    if isinstance(value, np.ndarray):
        return value.astype(np.uint64, copy=False)
    if isinstance(value, (int, np.integer)):
        return np.array([int(value) & _MASK64], dtype=np.uint64)
    arr = np.asarray(value)
    if arr.dtype.kind == "i":
        return arr.astype(np.int64).view(np.uint64)
    return arr.astype(np.uint64)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _stream_key(master_seed, generation, index, lane) -> np.ndarray:
    k = _mix(_u64(master_seed) + _GOLDEN)
    k = _mix(k ^ _u64(generation))
    k = _mix(k ^ _u64(index))
    return _mix(k ^ _u64(lane))


def counter_uniforms(master_seed, generation, index, lane, counters) -> np.ndarray:
    """Uniform doubles in [0, 1) for a grid of streams and counters.

    ``index`` and ``counters`` broadcast against each other; the usual call is
    ``index`` of shape (N, 1) and ``counters`` of shape (K,), giving (N, K).
    """
    key = _stream_key(master_seed, generation, _u64(index), lane)
    z = _mix(key + (_u64(counters) + np.uint64(1)) * _GOLDEN)
    return (z >> np.uint64(11)).astype(np.float64) * _DOUBLE_UNIT


class RngStream:
    """Sequential view of one counter-based stream.

    Draws advance an internal counter; two streams with the same coordinates
    yield the same sequence. ``lane`` returns a fresh sibling stream that
    shares (seed, generation, index) but is statistically independent.
    """

    __slots__ = ("master_seed", "generation", "index", "lane_id", "counter")

    def __init__(self, master_seed: int, generation: int, index: int, lane: int = Lane.INDEX):
        self.master_seed = int(master_seed)
        self.generation = int(generation)
        self.index = int(index)
        self.lane_id = int(lane)
        self.counter = 0

    @property
    def stream_id(self) -> tuple[int, int]:
        return (self.generation, self.index)

    def lane(self, lane: int) -> "RngStream":
        return RngStream(self.master_seed, self.generation, self.index, lane)

    def uniform(self, size: int | None = None):
        n = 1 if size is None else int(size)
        ctr = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        out = counter_uniforms(self.master_seed, self.generation, self.index, self.lane_id, ctr)
        return float(out[0]) if size is None else out

    def integers(self, high: int, size: int | None = None):
        """Integers in [0, high) by scaling a uniform draw."""
        u = self.uniform(size)
        if size is None:
            return int(u * high)
        return (u * high).astype(np.int64)

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.master_seed}, generation={self.generation}, "
            f"index={self.index}, lane={self.lane_id}, counter={self.counter})"
        )


def derive_stream(master_seed: int, generation: int, individual_index: int) -> RngStream:
    return RngStream(master_seed, generation, individual_index, Lane.INDEX)


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


_executors: dict[int, ThreadPoolExecutor] = {}
_executor_lock = threading.Lock()


def _executor(workers: int) -> ThreadPoolExecutor:
    with _executor_lock:
        ex = _executors.get(workers)
        if ex is None:
            ex = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="istratde-eval")
            _executors[workers] = ex
        return ex


def evaluate_population(problem, vectors: np.ndarray, parallelism: int | None = None) -> np.ndarray:
    """Evaluate every row of ``vectors`` on ``problem``.

    Rows are split into fixed-size chunks whatever the worker count, and
    each chunk writes its own slice of the output, so the result is
    bit-identical for any ``parallelism``.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 1:
        raise ValueError("evaluate_population needs an (M, D) array with M >= 1")
    workers = default_workers() if parallelism is None else max(1, int(parallelism))
    m = vectors.shape[0]
    out = np.empty(m, dtype=np.float64)
    bounds = [(s, min(s + EVAL_CHUNK_ROWS, m)) for s in range(0, m, EVAL_CHUNK_ROWS)]

    def run(span):
        lo, hi = span
        out[lo:hi] = problem.evaluate(vectors[lo:hi])

    if workers == 1 or len(bounds) == 1:
        for span in bounds:
            run(span)
    else:
        list(_executor(workers).map(run, bounds))
    return out
