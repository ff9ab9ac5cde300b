import numpy as np
import pytest

from qsolab.core import (
    Density,
    InvalidParameter,
    InvalidRange,
    NotInvariantSeed,
    StochasticMatrix,
    apply,
    diag,
    find_invariant,
    homogeneous_window,
    iterate,
    l1_distance,
    transition_matrix,
    window,
)
from qsolab.evaluation import delta_coeff
from qsolab.operators import make_markov_averaging, make_q_diamond, perturb, sample_qso

from .conftest import random_densities


def test_stochastic_matrix_validation():
    M = StochasticMatrix([[0.3, 1.0], [0.7, 0.0]])
    assert M.dim == 2
    assert M.columns[1] == Density.vertex(2, 0)
    with pytest.raises(InvalidParameter):
        StochasticMatrix([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(InvalidParameter):
        StochasticMatrix([[1.0, 0.0, 0.0]])


def test_rank_one_sends_everything_to_v():
    v = Density([0.1, 0.6, 0.3])
    M = StochasticMatrix.rank_one(v)
    for g in random_densities(3, 4, 0):
        np.testing.assert_allclose(M.apply(g).values, v.values, atol=1e-15)


def test_transition_matrix_columns(random_qso):
    f = Density([0.2, 0.5, 0.3])
    T = transition_matrix(random_qso, f)
    for j in range(3):
        expected = apply(random_qso, f, Density.vertex(3, j))
        np.testing.assert_allclose(T.matrix[:, j], expected.values, atol=1e-14)
    np.testing.assert_allclose(T.apply(f).values, diag(random_qso, f).values, atol=1e-14)


def test_empty_window_is_identity(random_qso):
    win = window(random_qso, Density.uniform(3), 2, 2)
    assert win.product == StochasticMatrix.identity(3)
    assert win.trajectory == ()


@pytest.mark.parametrize("m,n", [(-1, 2), (3, 2)])
def test_window_range(random_qso, m, n):
    with pytest.raises(InvalidRange):
        window(random_qso, Density.uniform(3), m, n)


def test_window_composes(random_qso):
    f = Density([0.6, 0.1, 0.3])
    whole = window(random_qso, f, 0, 4).product.matrix
    head = window(random_qso, f, 0, 1).product
    tail = window(random_qso, f, 1, 4).product
    np.testing.assert_allclose(whole, (tail @ head).matrix, atol=1e-14)


def test_window_moves_the_seed_along_its_trajectory(random_qso):
    f = Density([0.6, 0.1, 0.3])
    win = window(random_qso, f, 0, 5)
    np.testing.assert_allclose(
        win.product.apply(f).values, iterate(random_qso, f, 5)[-1].values, atol=1e-13
    )
    assert len(win.trajectory) == 5


def test_block_chain_is_frozen_after_one_step(block_qso):
    f = Density([0.0, 0.0, 0.4, 0.6])
    h2 = np.array([0.0, 0.0, 0.5, 0.5])
    for n in (1, 2, 5):
        np.testing.assert_allclose(window(block_qso, f, 0, n).product.apply(f).values, h2, atol=1e-15)


def test_homogeneous_window_matches_window():
    anchor = Density([0.2, 0.3, 0.5])
    Q = make_q_diamond(anchor)
    power = homogeneous_window(Q, anchor, 3)
    np.testing.assert_allclose(power.matrix, window(Q, anchor, 0, 3).product.matrix, atol=1e-14)
    np.testing.assert_allclose(power.matrix, StochasticMatrix.rank_one(anchor).matrix, atol=1e-14)


def test_homogeneous_window_requires_invariant_seed():
    swap = make_markov_averaging(StochasticMatrix([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(NotInvariantSeed):
        homogeneous_window(swap, Density.vertex(2, 0), 2)
    assert homogeneous_window(swap, Density.uniform(2), 0) == StochasticMatrix.identity(2)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_homogeneous_window_at_a_found_invariant(seed):
    Q = perturb(sample_qso(4, 1.0, seed), 0.9)
    f = find_invariant(Q, Density.vertex(4, 0))
    assert l1_distance(diag(Q, f), f) <= 1e-12
    for n in (0, 1, 5):
        np.testing.assert_allclose(
            homogeneous_window(Q, f, n).matrix, window(Q, f, 0, n).product.matrix, atol=1e-9
        )


@pytest.mark.parametrize("seed", [0, 5, 9])
def test_longer_windows_never_mix_less(seed):
    Q = sample_qso(4, 0.5, seed)
    for f in random_densities(4, 3, seed):
        coefficients = [delta_coeff(window(Q, f, 0, n).product) for n in range(8)]
        assert coefficients[0] == 2.0
        for a, b in zip(coefficients, coefficients[1:]):
            assert b <= a + 1e-12


def test_window_products_contract(random_qso):
    g, h, seed = random_densities(3, 3, 4)
    for n in (1, 3, 6):
        M = window(random_qso, seed, 0, n).product
        assert l1_distance(M.apply(g), M.apply(h)) <= l1_distance(g, h) + 1e-12
