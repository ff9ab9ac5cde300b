import numpy as np
import pytest

from qsolab.core import Density, validate
from qsolab.operators import make_block_example, perturb, sample_qso


def oscillating_qso():
    """
    Symmetric two-state operator with ``delta_1 = 2`` and no invariant blocks:
    ``q[0,0] = e1``, every other pair goes to ``e0``. Its chains mix after two steps.
    """
    e0, e1 = [1.0, 0.0], [0.0, 1.0]
    return validate([[e1, e0], [e0, e0]], symmetric_required=True)


def frozen_qso():
    """Two states; the chain seeded at ``e0`` is the identity forever."""
    e0, e1 = [1.0, 0.0], [0.0, 1.0]
    return validate([[e0, e1], [e1, [0.5, 0.5]]], symmetric_required=True)


def random_densities(d, count, seed):
    rng = np.random.default_rng(seed)
    return [Density(rng.dirichlet(np.ones(d))) for _ in range(count)]


@pytest.fixture
def block_qso():
    return make_block_example(4, 2)


@pytest.fixture
def random_qso():
    return sample_qso(3, 1.0, 11)


@pytest.fixture
def perturbed_qso(random_qso):
    return perturb(random_qso, 0.1)
