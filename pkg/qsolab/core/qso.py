"""
Quadratic stochastic operators on the d-simplex.

A :class:`Qso` stores the cubic array ``q[i, j, k]``; the operator acts on a
pair of densities by ``Q(x, y)_k = sum_ij x_i y_j q[i, j, k]`` and its diagonal
``f -> Q(f, f)`` drives the nonlinear dynamics.
"""
import logging
from typing import List

import numpy as np

from .exceptions import (
    AsymmetricEntry,
    DimensionMismatch,
    InvalidOperator,
    InvalidParameter,
    NegativeEntry,
    NotInvariantSeed,
    PreconditionViolation,
    RowNotStochastic,
)
from .simplex import CONSTRUCT_TOL, IDENTITY_TOL, Density, SignedVector, l1_distance

__all__ = [
    "Qso",
    "validate",
    "apply",
    "apply_signed",
    "diag",
    "iterate",
    "check_monotone",
    "find_invariant",
]

logger = logging.getLogger(__name__)

# rows already this close to 1 are left bitwise untouched, so validation is idempotent
_EXACT_ROW_TOL = 1e-13


class Qso:
    """
    A validated cubic stochastic array. Build instances with :func:`validate`.

    Attributes:
        dim (int): number of coordinates ``d``.
        q (np.ndarray): read-only ``(d, d, d)`` array, ``q[i, j]`` is the image
            of the vertex pair ``(e_i, e_j)``.
        symmetric (bool): whether ``q[i, j] == q[j, i]`` is enforced.
        max_renormalization (float): largest row-sum deviation corrected on load.
    """

    __slots__ = ("q", "symmetric", "max_renormalization")

    def __init__(self, q: np.ndarray, symmetric: bool, max_renormalization: float = 0.0):
        q.setflags(write=False)
        self.q = q
        self.symmetric = bool(symmetric)
        self.max_renormalization = float(max_renormalization)

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def column(self, i: int, j: int) -> Density:
        return Density._wrap(self.q[i, j])

    def to_dict(self) -> dict:
        return {"dim": self.dim, "symmetric": self.symmetric, "q": self.q.tolist()}

    def __eq__(self, other):
        if not isinstance(other, Qso):
            return NotImplemented
        return self.symmetric == other.symmetric and np.array_equal(self.q, other.q)

    def __hash__(self):
        return hash((self.symmetric, self.q.tobytes()))

    def __repr__(self):
        return "Qso(dim={}, symmetric={})".format(self.dim, self.symmetric)


def validate(raw, symmetric_required: bool = True) -> Qso:
    """
    Check the axioms of a quadratic stochastic operator and build a :class:`Qso`.

    * every entry is nonnegative (entries down to -1e-12 are clamped);
    * every row ``q[i, j, :]`` sums to one within 1e-9, then is renormalized;
    * with ``symmetric_required``, ``q[i, j, k] == q[j, i, k]`` within 1e-12,
      then the array is symmetrized exactly.

    Raises:
        InvalidOperator: wrong shape or non-finite entries.
        NegativeEntry, RowNotStochastic, AsymmetricEntry: axiom violations.
    """
    q = np.array(raw, dtype=np.float64)
    if q.ndim != 3 or not (q.shape[0] == q.shape[1] == q.shape[2]) or q.shape[0] == 0:
        raise InvalidOperator(f"operator array must be d x d x d, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InvalidOperator("operator array has non-finite entries")

    if q.min() < -IDENTITY_TOL:
        i, j, k = np.unravel_index(np.argmin(q), q.shape)
        raise NegativeEntry(int(i), int(j), int(k), float(q[i, j, k]))
    q = np.clip(q, 0.0, None)

    totals = q.sum(axis=2)
    deviation = np.abs(totals - 1.0)
    if deviation.max() > CONSTRUCT_TOL:
        i, j = np.unravel_index(np.argmax(deviation), deviation.shape)
        raise RowNotStochastic(int(i), int(j), float(totals[i, j]))

    if symmetric_required:
        gap = np.abs(q - q.transpose(1, 0, 2))
        if gap.max() > IDENTITY_TOL:
            i, j, k = np.unravel_index(np.argmax(gap), gap.shape)
            raise AsymmetricEntry(int(i), int(j), int(k), float(gap[i, j, k]))
        q = (q + q.transpose(1, 0, 2)) / 2.0
        totals = q.sum(axis=2)

    sloppy = np.abs(totals - 1.0) > _EXACT_ROW_TOL
    if sloppy.any():
        q[sloppy] /= totals[sloppy][:, None]
    return Qso(q, symmetric=symmetric_required, max_renormalization=float(deviation.max()))


def _check(Q: Qso, *vectors):
    for v in vectors:
        if v.dim != Q.dim:
            raise DimensionMismatch(Q.dim, v.dim)


def _bilinear(Q: Qso, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    weights = np.outer(x, y)
    if Q.symmetric:
        # symmetrized weights make Q(x, y) and Q(y, x) bitwise equal
        weights = (weights + weights.T) / 2.0
    return np.tensordot(weights, Q.q, axes=([0, 1], [0, 1]))


def apply(Q: Qso, x: Density, y: Density) -> Density:
    """``Q(x, y)``; a density for any pair of densities."""
    _check(Q, x, y)
    return Density._wrap(_bilinear(Q, x.values, y.values))


def apply_signed(Q: Qso, w: SignedVector, y: Density) -> SignedVector:
    """
    Bilinear extension to a signed first argument; ``‖Q(w, y)‖₁ ≤ ‖w‖₁ ‖y‖₁``.
    """
    _check(Q, w, y)
    return SignedVector._wrap(_bilinear(Q, w.values, y.values))


def diag(Q: Qso, f: Density) -> Density:
    return apply(Q, f, f)


def iterate(Q: Qso, f: Density, n: int) -> List[Density]:
    """
    The trajectory ``[f, Q(f), ..., Q^n(f)]`` of the diagonal map.
    """
    if n < 0:
        raise InvalidParameter(f"number of iterations must be nonnegative, got {n!r}")
    trajectory = [f]
    for _ in range(n):
        trajectory.append(diag(Q, trajectory[-1]))
    return trajectory


def check_monotone(
    Q: Qso, f: Density, g: Density, ftilde: SignedVector, gtilde: SignedVector
) -> bool:
    """
    Whether ``Q(ftilde, gtilde) >= Q(f, g)`` entrywise, given ``ftilde >= f``
    and ``gtilde >= g``. Holds for every valid operator.

    Raises:
        PreconditionViolation: when ``ftilde`` or ``gtilde`` does not dominate.
    """
    _check(Q, f, g, ftilde, gtilde)
    if np.any(ftilde.values < f.values) or np.any(gtilde.values < g.values):
        raise PreconditionViolation("ftilde >= f and gtilde >= g are required entrywise")
    big = _bilinear(Q, ftilde.values, gtilde.values)
    small = _bilinear(Q, f.values, g.values)
    return bool(np.all(big >= small - IDENTITY_TOL))


def find_invariant(Q: Qso, f: Density, tol: float = 1e-13, max_iter: int = 10_000) -> Density:
    """
    Iterate the diagonal map from ``f`` until two consecutive iterates are
    within ``tol`` in l1.

    Raises:
        NotInvariantSeed: if no fixed point is reached within ``max_iter`` steps.
    """
    current = f
    for step in range(max_iter):
        nxt = diag(Q, current)
        if l1_distance(nxt, current) <= tol:
            logger.debug("fixed point reached after {} iterations".format(step + 1))
            return nxt
        current = nxt
    raise NotInvariantSeed(f"no fixed point within {max_iter} iterations (tol={tol})")
