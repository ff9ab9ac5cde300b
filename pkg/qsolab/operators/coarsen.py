"""
Coarsening of an operator along a partition of its coordinates.

Cells ``c`` of the fine model carry positive weights ``mu_c``. Block ``I``
is represented on the fine level by the piecewise-constant density
``u^I = mu_c / mu(B_I)`` on its cells, and the coarse operator is

    qbar[I, J, K] = sum_{k in B_K} Q(u^I, u^J)_k .
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import DimensionMismatch, InvalidPartition, NumericAssertionError
from ..core.qso import Qso, apply, validate
from ..core.simplex import Density, RngLike, as_generator
from ..evaluation.metrics import hat_du_exact

__all__ = ["Partition", "coarsen", "coarsen_lipschitz_check"]

logger = logging.getLogger(__name__)

_RANGE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Partition:
    """
    Ordered blocks of zero-based fine indices covering ``0..fine_dim-1`` with a
    positive weight per cell.
    """

    fine_dim: int
    blocks: Tuple[Tuple[int, ...], ...]
    weights: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        blocks = tuple(tuple(int(c) for c in block) for block in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.fine_dim < 1:
            raise InvalidPartition(f"fine_dim must be positive, got {self.fine_dim}")
        if any(len(block) == 0 for block in blocks):
            raise InvalidPartition("empty block")
        cells = sorted(c for block in blocks for c in block)
        if cells != list(range(self.fine_dim)):
            raise InvalidPartition(
                f"blocks must be disjoint and cover 0..{self.fine_dim - 1}, got {blocks}"
            )
        weights = np.ones(self.fine_dim) if self.weights is None else self.weights
        weights = np.array(weights, dtype=np.float64)
        if weights.shape != (self.fine_dim,):
            raise InvalidPartition(f"expected {self.fine_dim} cell weights, got {weights.shape}")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidPartition("cell weights must be finite and positive")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def block_weights(self) -> np.ndarray:
        return np.array([self.weights[list(block)].sum() for block in self.blocks])

    def lift_matrix(self) -> np.ndarray:
        """``(K, N)`` matrix whose row ``I`` is the fine density ``u^I``."""
        lift = np.zeros((self.num_blocks, self.fine_dim))
        for I, block in enumerate(self.blocks):
            idx = list(block)
            lift[I, idx] = self.weights[idx] / self.weights[idx].sum()
        return lift

    def sum_matrix(self) -> np.ndarray:
        """``(K, N)`` 0/1 matrix summing fine mass into blocks."""
        agg = np.zeros((self.num_blocks, self.fine_dim))
        for I, block in enumerate(self.blocks):
            agg[I, list(block)] = 1.0
        return agg

    def lift(self, block: int) -> Density:
        return Density._wrap(self.lift_matrix()[block])

    def push(self, f: Density) -> Density:
        """Block masses of a fine density."""
        if f.dim != self.fine_dim:
            raise DimensionMismatch(self.fine_dim, f.dim)
        return Density._wrap(self.sum_matrix() @ f.values)

    @classmethod
    def singletons(cls, fine_dim: int, weights: Optional[Sequence[float]] = None) -> "Partition":
        return cls(fine_dim, tuple((c,) for c in range(fine_dim)), weights)

    @classmethod
    def single_block(cls, fine_dim: int, weights: Optional[Sequence[float]] = None) -> "Partition":
        return cls(fine_dim, (tuple(range(fine_dim)),), weights)

    @classmethod
    def from_inline(cls, spec: str, fine_dim: Optional[int] = None) -> "Partition":
        """
        Parse ``"1-3|4-6"`` (one-based, inclusive ranges or single indices,
        comma separated inside a block) with unit weights.
        """
        blocks = []
        for chunk in spec.split("|"):
            block = []
            for part in chunk.split(","):
                match = _RANGE.match(part)
                if match is None:
                    raise InvalidPartition(f"cannot parse block {chunk!r} in {spec!r}")
                lo = int(match.group(1))
                hi = int(match.group(2) or lo)
                if lo < 1 or hi < lo:
                    raise InvalidPartition(f"bad range {part!r} in {spec!r}")
                block.extend(range(lo - 1, hi))
            blocks.append(tuple(block))
        inferred = max(c for block in blocks for c in block) + 1
        return cls(inferred if fine_dim is None else fine_dim, tuple(blocks))

    @classmethod
    def from_dict(cls, doc: dict) -> "Partition":
        try:
            return cls(int(doc["fine_dim"]), tuple(tuple(b) for b in doc["blocks"]), doc.get("weights"))
        except (KeyError, TypeError) as e:
            raise InvalidPartition(f"malformed partition document: {e}") from e

    def to_dict(self) -> dict:
        return {
            "fine_dim": self.fine_dim,
            "blocks": [list(block) for block in self.blocks],
            "weights": self.weights.tolist(),
        }


def coarsen(Q: Qso, part: Partition) -> Qso:
    """
    The coarse operator on ``part.num_blocks`` coordinates (see module doc).
    Axioms are preserved: every coarse column is a block-sum of a density.
    """
    if part.fine_dim != Q.dim:
        raise DimensionMismatch(Q.dim, part.fine_dim, what="partition")
    lift = part.lift_matrix()
    agg = part.sum_matrix()
    q = np.einsum("Ii,Jj,ijk,Kk->IJK", lift, lift, Q.q, agg, optimize=True)
    return validate(q, symmetric_required=Q.symmetric)


def coarsen_lipschitz_check(
    Q1: Qso, Q2: Qso, part: Partition, starts: int = 0, rng_seed: RngLike = 0
) -> Tuple[float, float]:
    """
    Returns the exact ``(coarse, fine)`` bilinear uniform distances; coarsening
    never increases the distance.

    ``starts`` random pairs of coarse densities ``(x, y)`` are also checked
    pointwise: the coarse gap at ``(x, y)`` stays below the fine gap at the
    lifted pair.

    Raises:
        NumericAssertionError: a pointwise gap grows under coarsening.
    """
    if Q1.dim != Q2.dim:
        raise DimensionMismatch(Q1.dim, Q2.dim)
    C1, C2 = coarsen(Q1, part), coarsen(Q2, part)
    coarse, _ = hat_du_exact(C1, C2)
    fine, _ = hat_du_exact(Q1, Q2)

    rng = as_generator(rng_seed)
    lift = part.lift_matrix()
    alpha = np.ones(part.num_blocks)
    for _ in range(starts):
        x, y = (Density._wrap(rng.dirichlet(alpha)) for _ in range(2))
        fx, fy = Density._wrap(x.values @ lift), Density._wrap(y.values @ lift)
        coarse_gap = float(np.abs(apply(C1, x, y).values - apply(C2, x, y).values).sum())
        fine_gap = float(np.abs(apply(Q1, fx, fy).values - apply(Q2, fx, fy).values).sum())
        if coarse_gap > fine_gap + 1e-9:
            raise NumericAssertionError(
                f"coarse gap {coarse_gap!r} exceeds the lifted fine gap {fine_gap!r}"
            )
    return coarse, fine
