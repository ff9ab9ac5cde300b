"""
Support-pattern analysis of an operator.

An operator refutes quasi-mixing structurally when there are disjoint index
sets ``B1`` and ``B2`` such that

* ``B2`` is closed: ``q[i, j]`` is supported in ``B2`` whenever ``i, j ∈ B2``;
* ``B1`` is absorbing for the chain run on ``B2``: ``q[i, j]`` is supported in
  ``B1`` whenever ``i ∈ B2`` and ``j ∈ B1``.

Seeding the chain with any density on ``B2`` then keeps the images of a
``B1``-supported argument and of a ``B2``-supported argument disjoint at every
horizon, so the window coefficient stays exactly 2.
"""
import logging
from dataclasses import dataclass
from typing import FrozenSet, Optional

import numpy as np

from ..core.qso import Qso

__all__ = ["BlockWitness", "find_invariant_blocks"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockWitness:
    """
    Zero-based index sets with ``seed ∈ B2`` and ``target ∈ B1``; the chain
    seeded at ``e_seed`` separates ``e_seed`` from ``e_target`` forever.
    """

    B1: FrozenSet[int]
    B2: FrozenSet[int]
    seed: int
    target: int

    def as_dict(self) -> dict:
        return {
            "block_B1": " ".join(str(i + 1) for i in sorted(self.B1)),
            "block_B2": " ".join(str(i + 1) for i in sorted(self.B2)),
        }


def _closure(start, step):
    members = set(start)
    frontier = list(members)
    while frontier:
        new = step(frontier.pop(), members) - members
        members |= new
        frontier.extend(new)
    return members


def find_invariant_blocks(Q: Qso) -> Optional[BlockWitness]:
    """
    Exact search for a structural witness.

    For every ``i0`` the smallest closed set containing it is computed; for
    every ``j0`` outside it, the set reachable from ``j0`` under the chains
    driven by that closed set. Any witness pair of blocks contains one found
    this way, so ``None`` means no witness exists. Cost is ``O(d^5)`` in the
    worst case.
    """
    d = Q.dim
    support = Q.q > 0.0
    targets = [[frozenset(np.flatnonzero(support[i, j]).tolist()) for j in range(d)] for i in range(d)]

    for i0 in range(d):

        def grow_closed(new, members):
            out = set()
            for other in members:
                out |= targets[new][other] | targets[other][new]
            return out

        b2 = _closure({i0}, grow_closed)
        driver = sorted(b2)

        for j0 in range(d):
            if j0 in b2:
                continue
            b1 = _closure({j0}, lambda j, _m: set().union(*(targets[i][j] for i in driver)))
            if b1.isdisjoint(b2):
                witness = BlockWitness(frozenset(b1), frozenset(b2), seed=i0, target=j0)
                logger.debug(
                    "invariant blocks found: B1={} B2={}".format(sorted(b1), sorted(b2))
                )
                return witness
    return None
