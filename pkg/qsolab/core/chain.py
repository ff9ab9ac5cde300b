"""
The nonhomogeneous Markov chain associated with an operator and a seed density.

Step ``k`` of the chain seeded by ``f`` is the linear map
``h -> Q(Q^k(f), h)``; :func:`window` composes steps ``m .. n-1``.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DimensionMismatch, InvalidParameter, InvalidRange, NotInvariantSeed
from .qso import Qso, diag, iterate
from .simplex import CONSTRUCT_TOL, Density, SignedVector, l1_distance

__all__ = [
    "StochasticMatrix",
    "ChainWindow",
    "transition_matrix",
    "window",
    "homogeneous_window",
]


class StochasticMatrix:
    """
    A column-stochastic ``d x d`` matrix; column ``j`` is the image of ``e_j``.

    ``matrix[k, j]`` is the mass sent from coordinate ``j`` to ``k``. Columns are
    checked against ``tol`` and renormalized exactly.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, tol: float = CONSTRUCT_TOL):
        arr = np.array(matrix, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidParameter(f"stochastic matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < -1e-12:
            raise InvalidParameter("stochastic matrix must have finite nonnegative entries")
        arr = np.clip(arr, 0.0, None)
        totals = arr.sum(axis=0)
        if np.abs(totals - 1.0).max() > tol:
            j = int(np.argmax(np.abs(totals - 1.0)))
            raise InvalidParameter(f"column {j} sums to {totals[j]!r}, expected 1")
        self.matrix = _freeze(arr / totals)

    @classmethod
    def _wrap(cls, arr) -> "StochasticMatrix":
        obj = cls.__new__(cls)
        arr = np.clip(arr, 0.0, None)
        obj.matrix = _freeze(arr / arr.sum(axis=0))
        return obj

    @classmethod
    def identity(cls, dim: int) -> "StochasticMatrix":
        return cls._wrap(np.eye(dim))

    @classmethod
    def rank_one(cls, v: Density) -> "StochasticMatrix":
        """The matrix ``v 1^T`` sending every density to ``v``."""
        return cls._wrap(np.repeat(v.values[:, None], v.dim, axis=1))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def columns(self) -> Tuple[Density, ...]:
        return tuple(Density._wrap(col) for col in self.matrix.T)

    def apply(self, g: Density) -> Density:
        if g.dim != self.dim:
            raise DimensionMismatch(self.dim, g.dim)
        return Density._wrap(self.matrix @ g.values)

    def apply_signed(self, w: SignedVector) -> SignedVector:
        if w.dim != self.dim:
            raise DimensionMismatch(self.dim, w.dim)
        return SignedVector._wrap(self.matrix @ w.values)

    def power(self, n: int) -> "StochasticMatrix":
        return StochasticMatrix._wrap(np.linalg.matrix_power(self.matrix, n))

    def __matmul__(self, other: "StochasticMatrix") -> "StochasticMatrix":
        """``self @ other`` applies ``other`` first."""
        if other.dim != self.dim:
            raise DimensionMismatch(self.dim, other.dim)
        return StochasticMatrix._wrap(self.matrix @ other.matrix)

    def __eq__(self, other):
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __repr__(self):
        return "StochasticMatrix(\n{}\n)".format(np.array2string(self.matrix, precision=6))


def _freeze(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChainWindow:
    """
    The composed chain ``P_seed^{[m, n]}`` together with the diagonal iterates
    ``Q^m(seed), ..., Q^{n-1}(seed)`` it was built from.
    """

    qso: Qso
    seed: Density
    m: int
    n: int
    product: StochasticMatrix
    trajectory: Tuple[Density, ...]


def transition_matrix(Q: Qso, f: Density) -> StochasticMatrix:
    """
    The one-step matrix ``h -> Q(f, h)``: entry ``(k, j) = sum_i f_i q[i, j, k]``.
    """
    if f.dim != Q.dim:
        raise DimensionMismatch(Q.dim, f.dim)
    return StochasticMatrix._wrap(np.tensordot(f.values, Q.q, axes=(0, 0)).T)


def window(Q: Qso, seed: Density, m: int, n: int) -> ChainWindow:
    """
    ``P_seed^{[m, n]} = T_{n-1} ... T_m`` with ``T_k = transition_matrix(Q, Q^k(seed))``;
    the empty window ``m == n`` is the identity.
    """
    if not 0 <= m <= n:
        raise InvalidRange(f"window requires 0 <= m <= n, got m={m}, n={n}")
    if seed.dim != Q.dim:
        raise DimensionMismatch(Q.dim, seed.dim)
    states = iterate(Q, seed, max(n - 1, 0))[m:n]
    product = np.eye(Q.dim)
    for state in states:
        product = transition_matrix(Q, state).matrix @ product
    return ChainWindow(
        qso=Q,
        seed=seed,
        m=m,
        n=n,
        product=StochasticMatrix._wrap(product),
        trajectory=tuple(states),
    )


def homogeneous_window(Q: Qso, f: Density, n: int) -> StochasticMatrix:
    """
    For a fixed point ``f`` of the diagonal map the chain is homogeneous and
    ``P_f^{[0, n]}`` is the n-th power of ``transition_matrix(Q, f)``.

    Raises:
        NotInvariantSeed: if ``‖Q(f) − f‖₁ > 1e-9``.
    """
    if n < 0:
        raise InvalidRange(f"window length must be nonnegative, got {n}")
    residual = l1_distance(diag(Q, f), f)
    if residual > CONSTRUCT_TOL:
        raise NotInvariantSeed(f"seed is not invariant: ‖Q(f) − f‖₁ = {residual:.3e}")
    return transition_matrix(Q, f).power(n)
