"""
Named operator families and random samplers.

* ``make_q_diamond``: every pair is sent to a fixed anchor density.
* ``make_q_flat`` / ``make_q_sharp``: the nonsymmetric projections onto the
  first / second argument.
* ``make_markov_averaging``: ``Q(f, g) = (P f + P g) / 2`` for a Markov matrix P.
* ``make_block_example``: a two-block operator whose chain never mixes.
* ``perturb``: convex combination with a diamond operator.
* ``sample_qso``: symmetric Dirichlet columns.
"""
import itertools
import logging
from typing import Optional, Sequence

import numpy as np

from ..core.chain import StochasticMatrix
from ..core.exceptions import DimensionMismatch, InvalidParameter, PreconditionViolation
from ..core.qso import Qso, validate
from ..core.simplex import Density, RngLike, as_generator

__all__ = [
    "make_q_diamond",
    "make_q_flat",
    "make_q_sharp",
    "make_markov_averaging",
    "make_block_example",
    "perturb",
    "sample_qso",
    "sample_stochastic_matrix",
]

logger = logging.getLogger(__name__)


def _check_dim(d):
    if int(d) != d or d < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def make_q_diamond(anchor: Density) -> Qso:
    """``q[i, j] = anchor`` for every pair."""
    d = anchor.dim
    return validate(np.broadcast_to(anchor.values, (d, d, d)), symmetric_required=True)


def make_q_flat(d: int) -> Qso:
    """``Q(f, g) = f``: ``q[i, j, k] = 1 if k == i``."""
    d = _check_dim(d)
    q = np.zeros((d, d, d))
    for i in range(d):
        q[i, :, i] = 1.0
    return validate(q, symmetric_required=False)


def make_q_sharp(d: int) -> Qso:
    """``Q(f, g) = g``: ``q[i, j, k] = 1 if k == j``."""
    d = _check_dim(d)
    q = np.zeros((d, d, d))
    for j in range(d):
        q[:, j, j] = 1.0
    return validate(q, symmetric_required=False)


def make_markov_averaging(P: StochasticMatrix) -> Qso:
    """
    ``q[i, j, k] = (P[k, i] + P[k, j]) / 2``. Every step matrix of the
    associated chain is ``P / 2 + (P f) 1^T / 2``, so its column spread is half
    that of ``P``.
    """
    cols = P.matrix.T
    q = (cols[:, None, :] + cols[None, :, :]) / 2.0
    return validate(q, symmetric_required=True)


def make_block_example(d: int = 4, split: int = 2, h: Optional[Sequence[float]] = None) -> Qso:
    """
    Two-block operator on ``B1 = {0..split-1}``, ``B2 = {split..d-1}``.

    With ``h1 = h 1_B1 / sum_B1 h`` and ``h2 = h 1_B2 / sum_B2 h`` the column
    ``q[i, j]`` is ``h2`` when both ``i`` and ``j`` lie in ``B2`` and ``h1``
    otherwise. A chain seeded inside ``B2`` keeps B1- and B2-supported arguments
    apart forever.
    """
    d = _check_dim(d)
    if not 1 <= split < d:
        raise InvalidParameter(f"split must satisfy 1 <= split < d, got split={split}, d={d}")
    h = np.ones(d) if h is None else np.asarray(h, dtype=np.float64)
    if h.shape != (d,):
        raise DimensionMismatch(d, h.shape[0] if h.ndim == 1 else h.shape, what="h")
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise InvalidParameter("h must be strictly positive on both blocks")
    h1 = np.where(np.arange(d) < split, h, 0.0)
    h2 = np.where(np.arange(d) >= split, h, 0.0)
    h1, h2 = h1 / h1.sum(), h2 / h2.sum()
    in_b2 = np.arange(d) >= split
    both_b2 = np.logical_and.outer(in_b2, in_b2)
    q = np.where(both_b2[:, :, None], h2, h1)
    return validate(q, symmetric_required=True)


def perturb(Q: Qso, epsilon: float, anchor: Optional[Density] = None) -> Qso:
    """
    ``(1 − ε) Q + ε Q◇`` with the diamond operator anchored at ``anchor``
    (uniform by default). Stays within ``2ε`` of ``Q`` in the bilinear uniform
    metric, and every step matrix of its chains has column spread at most
    ``2(1 − ε)``.
    """
    if not Q.symmetric:
        raise PreconditionViolation("perturb requires a symmetric operator")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon!r}")
    anchor = Density.uniform(Q.dim) if anchor is None else anchor
    if anchor.dim != Q.dim:
        raise DimensionMismatch(Q.dim, anchor.dim, what="anchor")
    q = (1.0 - epsilon) * Q.q + epsilon * anchor.values[None, None, :]
    return validate(q, symmetric_required=True)


def sample_qso(d: int, alpha: float, rng_seed: RngLike) -> Qso:
    """
    Random symmetric operator: for each unordered pair ``{i, j}`` (lexicographic
    order, ``i <= j``) the column ``q[i, j]`` is drawn from the symmetric
    Dirichlet(alpha) and mirrored to ``q[j, i]``.
    """
    d = _check_dim(d)
    if not alpha > 0:
        raise InvalidParameter(f"alpha must be positive, got {alpha!r}")
    rng = as_generator(rng_seed)
    q = np.empty((d, d, d))
    concentration = np.full(d, float(alpha))
    for i, j in itertools.combinations_with_replacement(range(d), 2):
        column = rng.dirichlet(concentration) if d > 1 else np.ones(1)
        q[i, j] = column
        q[j, i] = column
    return validate(q, symmetric_required=True)


def sample_stochastic_matrix(d: int, alpha: float, rng_seed: RngLike) -> StochasticMatrix:
    """Column-stochastic matrix with independent Dirichlet(alpha) columns."""
    d = _check_dim(d)
    rng = as_generator(rng_seed)
    if d == 1:
        return StochasticMatrix.identity(1)
    return StochasticMatrix(rng.dirichlet(np.full(d, float(alpha)), size=d).T)
