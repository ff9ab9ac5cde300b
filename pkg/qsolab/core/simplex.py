"""
Densities on ``d`` coordinates and the l1 geometry of the probability simplex.

A :class:`Density` is the coordinate (piecewise-constant) model of a density: a
nonnegative vector summing to one. Differences of densities and other real
vectors are carried by :class:`SignedVector`. Both are immutable: their numpy
buffers are flagged read-only, so they can be shared between workers.
"""
import itertools
import logging
from typing import Callable, Iterator, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DegenerateDifference, DimensionMismatch, InvalidDensity, InvalidParameter

__all__ = [
    "CONSTRUCT_TOL",
    "IDENTITY_TOL",
    "Density",
    "SignedVector",
    "as_generator",
    "l1_distance",
    "meet",
    "gimel",
    "sample_density",
    "maximize_over_simplex",
    "simplex_grid",
]

CONSTRUCT_TOL = 1e-9
"""Input sloppiness accepted when building densities and operators."""

IDENTITY_TOL = 1e-12
"""Tolerance for exact arithmetic identities."""

_CLAMP_TOL = 1e-12

RngLike = Union[int, np.integer, np.random.Generator, np.random.SeedSequence]

logger = logging.getLogger(__name__)


def as_generator(rng_seed: RngLike) -> np.random.Generator:
    """
    Turn a seed (or an existing generator) into a ``numpy.random.Generator``.
    A generator passed in is used as-is, so callers own its state.
    """
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class SignedVector:
    """
    A finite real vector, typically an element of ``D - D``.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDensity(f"expected a non-empty 1-d vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDensity("vector has non-finite entries")
        arr.setflags(write=False)
        self._values = arr

    @classmethod
    def _wrap(cls, arr) -> "SignedVector":
        obj = cls.__new__(cls)
        obj._values = _frozen(arr)
        return obj

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    def norm(self) -> float:
        return float(np.abs(self._values).sum())

    def __sub__(self, other):
        _check_dims(self, other)
        return SignedVector._wrap(self._values - other.values)

    def __add__(self, other):
        _check_dims(self, other)
        return SignedVector._wrap(self._values + other.values)

    def __mul__(self, scalar):
        return SignedVector._wrap(self._values * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, (SignedVector, Density)):
            return NotImplemented
        return np.array_equal(self._values, other.values)

    def __hash__(self):
        return hash(self._values.tobytes())

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self._values, precision=6)})"


class Density(SignedVector):
    """
    A point of the probability simplex.

    Entries down to ``-1e-12`` are clamped to zero; the total must be within
    :data:`CONSTRUCT_TOL` of one and is then renormalized exactly.
    """

    __slots__ = ()

    def __init__(self, values, *, tol: float = CONSTRUCT_TOL):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDensity(f"expected a non-empty 1-d vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDensity("density has non-finite entries")
        if arr.min() < -_CLAMP_TOL:
            raise InvalidDensity(f"density has a negative entry {arr.min()!r}")
        arr = np.clip(arr, 0.0, None)
        total = arr.sum()
        if abs(total - 1.0) > tol:
            raise InvalidDensity(f"density entries sum to {total!r}, expected 1")
        self._values = _frozen(arr / total)

    @classmethod
    def _wrap(cls, arr) -> "Density":
        # arithmetic results that are densities up to rounding
        arr = np.clip(np.asarray(arr, dtype=np.float64), 0.0, None)
        obj = cls.__new__(cls)
        obj._values = _frozen(arr / arr.sum())
        return obj

    @classmethod
    def vertex(cls, dim: int, index: int) -> "Density":
        arr = np.zeros(dim)
        arr[index] = 1.0
        return cls._wrap(arr)

    @classmethod
    def uniform(cls, dim: int) -> "Density":
        return cls._wrap(np.full(dim, 1.0 / dim))

    def mix(self, other: "Density", weight: float) -> "Density":
        """``weight * self + (1 - weight) * other``."""
        _check_dims(self, other)
        return Density._wrap(weight * self._values + (1.0 - weight) * other.values)

    def signed(self) -> SignedVector:
        return SignedVector._wrap(self._values)


def _check_dims(u, v):
    if u.dim != v.dim:
        raise DimensionMismatch(u.dim, v.dim)


def l1_distance(u: SignedVector, v: SignedVector) -> float:
    _check_dims(u, v)
    return float(np.abs(u.values - v.values).sum())


def meet(u: Density, v: Density) -> SignedVector:
    """
    Entrywise minimum ``u ∧ v``. For densities ``‖u∧v‖₁ = 1 − ½‖u−v‖₁``.
    """
    _check_dims(u, v)
    return SignedVector._wrap(np.minimum(u.values, v.values))


def gimel(u: Density, v: Density) -> Tuple[Density, Density]:
    """
    Split ``u - v`` into two densities with disjoint supports.

    Returns ``(gplus, gminus)`` with ``gplus - gminus = (u - v) / (1 - ‖u∧v‖₁)``.

    Raises:
        DegenerateDifference: if ``u`` and ``v`` coincide up to 1e-12.
    """
    _check_dims(u, v)
    if l1_distance(u, v) <= IDENTITY_TOL:
        raise DegenerateDifference("u and v coincide; their normalized difference is undefined")
    common = np.minimum(u.values, v.values)
    scale = 1.0 - common.sum()
    gplus = Density._wrap((u.values - common) / scale)
    gminus = Density._wrap((v.values - common) / scale)
    return gplus, gminus


def sample_density(d: int, alpha: float, rng_seed: RngLike) -> Density:
    """
    Draw from the symmetric Dirichlet(alpha, ..., alpha) on ``d`` coordinates.
    """
    if int(d) != d or d < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {d!r}")
    if not alpha > 0:
        raise InvalidParameter(f"alpha must be positive, got {alpha!r}")
    rng = as_generator(rng_seed)
    if d == 1:
        return Density._wrap(np.ones(1))
    return Density._wrap(rng.dirichlet(np.full(int(d), float(alpha))))


def simplex_grid(d: int, resolution: int) -> Iterator[Density]:
    """
    All barycentric grid points ``k / resolution`` of the ``d``-simplex, in
    lexicographic order of the bar positions (stars and bars).
    """
    if resolution < 1:
        raise InvalidParameter(f"resolution must be positive, got {resolution!r}")
    for bars in itertools.combinations(range(resolution + d - 1), d - 1):
        edges = (-1,) + bars + (resolution + d - 1,)
        counts = np.diff(edges) - 1
        yield Density._wrap(counts / resolution)


def _line_search(phi, x: np.ndarray, i: int, j: int, current: float):
    """
    Best mass transfer ``t`` between coordinates ``i`` and ``j`` of ``x``:
    ``x_i += t, x_j -= t`` with ``t in [-x_i, x_j]``.
    """
    lo, hi = -x[i], x[j]
    if hi - lo <= 0.0:
        return current, None

    def moved(t):
        y = x.copy()
        y[i] += t
        y[j] -= t
        return y

    def negative(t):
        return -phi(Density._wrap(moved(t)))

    best_val, best_t = current, None
    # the objectives are piecewise smooth; endpoints are checked explicitly
    for t in (lo, hi):
        val = -negative(t)
        if val > best_val:
            best_val, best_t = val, t
    res = minimize_scalar(negative, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if -res.fun > best_val:
        best_val, best_t = -res.fun, float(res.x)
    if best_t is None:
        return current, None
    return best_val, moved(best_t)


def _climb(phi, start: Density, *, tol: float, max_sweeps: int) -> Tuple[float, Density]:
    x = start.values.copy()
    value = phi(start)
    pairs = list(itertools.combinations(range(x.shape[0]), 2))
    for _ in range(max_sweeps):
        sweep_start = value
        for i, j in pairs:
            new_value, y = _line_search(phi, x, i, j, value)
            if y is not None and new_value > value:
                value, x = new_value, np.clip(y, 0.0, None)
        if value - sweep_start < tol:
            break
    return value, Density._wrap(x)


def maximize_over_simplex(
    phi: Callable[[Density], float],
    d: int,
    starts: int,
    rng_seed: RngLike,
    *,
    tol: float = 1e-10,
    max_sweeps: int = 50,
    extra_starts: Sequence[Density] = (),
) -> Tuple[float, Density]:
    """
    Derivative-free multi-start maximization of ``phi`` over the d-simplex.

    The start set is: every vertex, every midpoint of two vertices,
    ``extra_starts`` and then ``starts`` Dirichlet(1) draws. Each start is refined
    by pairwise mass-transfer hill climbing (bounded line search per coordinate
    pair, sweeps until the improvement drops below ``tol``).

    The returned value is a lower bound on ``sup phi``. Growing ``starts`` with
    the same seed only adds start points, so the value never decreases.

    Returns:
        (value, argmax); ties keep the first start in the order above.
    """
    if starts < 0:
        raise InvalidParameter(f"starts must be nonnegative, got {starts!r}")
    rng = as_generator(rng_seed)
    candidates = [Density.vertex(d, i) for i in range(d)]
    candidates += [
        Density._wrap((np.eye(d)[i] + np.eye(d)[j]) / 2.0)
        for i, j in itertools.combinations(range(d), 2)
    ]
    candidates += list(extra_starts)
    # one draw at a time keeps the prefix of the stream identical across `starts`
    candidates += [Density._wrap(rng.dirichlet(np.ones(d))) for _ in range(starts if d > 1 else 0)]

    best_value, best_arg = -np.inf, None
    for start in candidates:
        value, arg = _climb(phi, start, tol=tol, max_sweeps=max_sweeps)
        if value > best_value:
            best_value, best_arg = value, arg
    return float(best_value), best_arg
