"""Shifted and rotated classical test functions with a known optimum of zero.

Each problem evaluates ``f_base(R @ (x - shift))`` (plus a constant offset
inside ``z`` for functions whose natural optimum is not the origin), so the
global minimum sits at ``x = shift`` with value 0 regardless of rotation.

Evaluation is written with elementwise numpy operations only. The rotation
is applied as an explicit column accumulation rather than a BLAS matmul,
which keeps a row evaluated alone bit-identical to the same row evaluated
inside any batch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, UnsupportedDimension

__all__ = [
    "FunctionId",
    "BenchmarkProblem",
    "make_problem",
    "problem_from_record",
    "evaluate",
    "round_reported",
    "REPORT_THRESHOLD",
    "BOXES",
]

REPORT_THRESHOLD = 1e-8


class FunctionId(str, Enum):
    SPHERE = "sphere"
    RASTRIGIN = "rastrigin"
    ACKLEY = "ackley"
    SCHWEFEL = "schwefel"
    ROSENBROCK = "rosenbrock"
    GRIEWANK = "griewank"
    LEVY = "levy"
    ZAKHAROV = "zakharov"


BOXES = {
    FunctionId.SPHERE: (-100.0, 100.0),
    FunctionId.RASTRIGIN: (-5.12, 5.12),
    FunctionId.ACKLEY: (-32.768, 32.768),
    FunctionId.SCHWEFEL: (-500.0, 500.0),
    FunctionId.ROSENBROCK: (-30.0, 30.0),
    FunctionId.GRIEWANK: (-600.0, 600.0),
    FunctionId.LEVY: (-10.0, 10.0),
    FunctionId.ZAKHAROV: (-10.0, 10.0),
}

# maximizer of z * sin(sqrt(|z|)) on [-500, 500]
_SCHWEFEL_OPT = 420.9687462275036
_TWO_PI = 2.0 * np.pi


def _sphere(z):
    return np.sum(z * z, axis=-1)


def _rastrigin(z):
    return np.sum(z * z + 10.0 * (1.0 - np.cos(_TWO_PI * z)), axis=-1)


def _ackley(z):
    d = z.shape[-1]
    r = np.sqrt(np.sum(z * z, axis=-1) / d)
    c = np.sum(np.cos(_TWO_PI * z), axis=-1) / d
    return 20.0 * (1.0 - np.exp(-0.2 * r)) + (np.e - np.exp(c))


def _schwefel_gain(z):
    """z sin(sqrt|z|) folded back into [0, 500] outside the box, minus a quadratic penalty."""
    inside = np.abs(z) <= 500.0
    m = np.mod(np.abs(z), 500.0)
    w = np.where(inside, z, 500.0 - m)
    gain = w * np.sin(np.sqrt(np.abs(w)))
    excess = np.where(inside, 0.0, (np.abs(z) - 500.0) / 100.0)
    return gain - excess * excess / z.shape[-1]


_SCHWEFEL_PEAK = float(_SCHWEFEL_OPT * np.sin(np.sqrt(_SCHWEFEL_OPT)))


def _schwefel(z):
    # z already carries the +420.97 offset; each term vanishes at the optimum
    return np.sum(_SCHWEFEL_PEAK - _schwefel_gain(z), axis=-1)


def _rosenbrock(z):
    # z is offset by +1 so the optimum is z = (1, ..., 1)
    a = z[..., :-1]
    b = z[..., 1:]
    t = b - a * a
    return np.sum(100.0 * t * t + (a - 1.0) * (a - 1.0), axis=-1)


def _griewank(z):
    j = np.sqrt(np.arange(1, z.shape[-1] + 1, dtype=np.float64))
    return np.sum(z * z, axis=-1) / 4000.0 + (1.0 - np.prod(np.cos(z / j), axis=-1))


def _levy(z):
    # z is offset by +1 so the optimum is z = (1, ..., 1)
    w = 1.0 + (z - 1.0) / 4.0
    s0 = np.sin(np.pi * w[..., 0])
    wm = w[..., :-1]
    sm = np.sin(np.pi * wm + 1.0)
    mid = np.sum((wm - 1.0) * (wm - 1.0) * (1.0 + 10.0 * sm * sm), axis=-1)
    wl = w[..., -1]
    sl = np.sin(_TWO_PI * wl)
    tail = (wl - 1.0) * (wl - 1.0) * (1.0 + sl * sl)
    head = s0 * s0
    return head + mid + tail


def _zakharov(z):
    k = 0.5 * np.arange(1, z.shape[-1] + 1, dtype=np.float64)
    s2 = np.sum(k * z, axis=-1)
    s2sq = s2 * s2
    return np.sum(z * z, axis=-1) + s2sq + s2sq * s2sq


_BASE = {
    FunctionId.SPHERE: (_sphere, 0.0),
    FunctionId.RASTRIGIN: (_rastrigin, 0.0),
    FunctionId.ACKLEY: (_ackley, 0.0),
    FunctionId.SCHWEFEL: (_schwefel, _SCHWEFEL_OPT),
    FunctionId.ROSENBROCK: (_rosenbrock, 1.0),
    FunctionId.GRIEWANK: (_griewank, 0.0),
    FunctionId.LEVY: (_levy, 1.0),
    FunctionId.ZAKHAROV: (_zakharov, 0.0),
}


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    """A seeded, shifted, optionally rotated instance of one test function."""

    function_id: FunctionId
    dim: int
    lb: np.ndarray
    ub: np.ndarray
    shift: np.ndarray
    rotation: np.ndarray
    seed: int = 0
    rotate: bool = False
    optimum_value: float = 0.0
    _identity: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "function_id", FunctionId(self.function_id))
        object.__setattr__(self, "_identity", bool(np.array_equal(self.rotation, np.eye(self.dim))))

    def evaluate(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected vectors of length {self.dim}, got shape {x.shape}")
        fn, offset = _BASE[self.function_id]
        single = x.ndim == 1
        d = np.atleast_2d(x) - self.shift
        if self._identity:
            z = d
        else:
            z = d[..., 0, None] * self.rotation[:, 0]
            for j in range(1, self.dim):
                z = z + d[..., j, None] * self.rotation[:, j]
        if offset:
            z = z + offset
        out = fn(z)
        return float(out[0]) if single else out

    def record(self) -> dict:
        """Plain record from which :func:`problem_from_record` rebuilds the problem."""
        return {
            "function_id": self.function_id.value,
            "dim": self.dim,
            "seed": self.seed,
            "rotate": self.rotate,
        }

    def __eq__(self, other):
        if not isinstance(other, BenchmarkProblem):
            return NotImplemented
        return (
            self.record() == other.record()
            and np.array_equal(self.shift, other.shift)
            and np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.lb, other.lb)
            and np.array_equal(self.ub, other.ub)
        )

    __hash__ = None


def _random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def make_problem(function_id, dim: int, seed: int = 0, rotate: bool = False) -> BenchmarkProblem:
    """Build a problem whose optimum sits at a seeded shift inside the box.

    The shift is drawn from the central 80% of the box. With ``rotate`` the
    rotation is a Haar-random orthogonal matrix from the QR decomposition of
    a Gaussian matrix; otherwise it is the identity.
    """
    fid = FunctionId(function_id)
    if dim < 1:
        raise UnsupportedDimension(f"dimension must be >= 1, got {dim}")
    if fid is FunctionId.SCHWEFEL and rotate:
        warnings.warn(
            "Schwefel's optimum lies near the box edge; rotating it can move the "
            "optimum's basin outside the box",
            stacklevel=2,
        )
    lo, hi = BOXES[fid]
    width = hi - lo
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, list(FunctionId).index(fid), int(dim)])
    rng = np.random.default_rng(ss)
    shift = rng.uniform(lo + 0.1 * width, hi - 0.1 * width, size=dim)
    rotation = _random_rotation(rng, dim) if rotate else np.eye(dim)
    return BenchmarkProblem(
        function_id=fid,
        dim=dim,
        lb=np.full(dim, lo),
        ub=np.full(dim, hi),
        shift=shift,
        rotation=rotation,
        seed=int(seed),
        rotate=bool(rotate),
    )


def problem_from_record(record: dict) -> BenchmarkProblem:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_problem(record["function_id"], int(record["dim"]), int(record["seed"]), bool(record["rotate"]))


def evaluate(problem: BenchmarkProblem, x):
    return problem.evaluate(x)


def round_reported(value: float, threshold: float = REPORT_THRESHOLD, optimum_value: float = 0.0) -> float:
    """Error relative to the optimum, with anything closer than ``threshold`` reported as 0."""
    err = float(value) - optimum_value
    return 0.0 if abs(err) < threshold else err
