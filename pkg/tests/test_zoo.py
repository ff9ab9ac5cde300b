import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolab.core import (
    Density,
    DimensionMismatch,
    InvalidParameter,
    PreconditionViolation,
    StochasticMatrix,
    apply,
    diag,
    transition_matrix,
    window,
)
from qsolab.evaluation import (
    Verdict,
    classify_quasi_mixing,
    delta1_exact,
    delta_coeff,
    delta_n_estimate,
    find_invariant_blocks,
    hat_du_exact,
)
from qsolab.operators import (
    make_block_example,
    make_markov_averaging,
    make_q_diamond,
    make_q_flat,
    make_q_sharp,
    perturb,
    sample_qso,
    sample_stochastic_matrix,
)

from .conftest import random_densities

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_diamond_sends_everything_to_anchor():
    anchor = Density([0.1, 0.2, 0.7])
    Q = make_q_diamond(anchor)
    for f, g in zip(random_densities(3, 3, 0), random_densities(3, 3, 1)):
        np.testing.assert_allclose(apply(Q, f, g).values, anchor.values, atol=1e-15)
    assert delta1_exact(Q)[0] == 0.0


def test_projections():
    f, g = random_densities(3, 2, 4)
    flat, sharp = make_q_flat(3), make_q_sharp(3)
    assert not flat.symmetric and not sharp.symmetric
    np.testing.assert_allclose(apply(flat, f, g).values, f.values, atol=1e-15)
    np.testing.assert_allclose(apply(sharp, f, g).values, g.values, atol=1e-15)
    np.testing.assert_allclose(diag(flat, f).values, diag(sharp, f).values, atol=1e-15)
    assert hat_du_exact(flat, sharp) == (2.0, (0, 1))


def test_markov_averaging_halves_every_step_spread():
    P = sample_stochastic_matrix(4, 0.5, 2)
    Q = make_markov_averaging(P)
    for f in random_densities(4, 5, 3):
        T = transition_matrix(Q, f)
        assert delta_coeff(T) == pytest.approx(0.5 * delta_coeff(P), abs=1e-12)
        expected = 0.5 * P.matrix + 0.5 * (P.matrix @ f.values)[:, None]
        np.testing.assert_allclose(T.matrix, expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_markov_averaging_decay(n):
    Q = make_markov_averaging(sample_stochastic_matrix(3, 0.3, 8))
    assert delta_n_estimate(Q, n, starts=2, rng_seed=0) <= 2.0 * 0.5**n + 1e-9


def test_block_example_layout():
    Q = make_block_example(5, 2, h=[1.0, 3.0, 1.0, 1.0, 2.0])
    h1 = np.array([0.25, 0.75, 0.0, 0.0, 0.0])
    h2 = np.array([0.0, 0.0, 0.25, 0.25, 0.5])
    np.testing.assert_allclose(Q.q[2, 4], h2)
    np.testing.assert_allclose(Q.q[0, 4], h1)
    np.testing.assert_allclose(Q.q[1, 1], h1)
    value, (m, i, j) = delta1_exact(Q)
    assert value == 2.0
    assert m >= 2


@pytest.mark.parametrize(
    "kwargs,error",
    [
        (dict(d=4, split=0), InvalidParameter),
        (dict(d=4, split=4), InvalidParameter),
        (dict(d=4, split=2, h=[1.0, 1.0, 1.0]), DimensionMismatch),
        (dict(d=4, split=2, h=[1.0, 0.0, 1.0, 1.0]), InvalidParameter),
    ],
)
def test_block_example_parameters(kwargs, error):
    with pytest.raises(error):
        make_block_example(**kwargs)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, eps=st.floats(min_value=0.01, max_value=0.99))
def test_perturb_distance_and_spread(seed, eps):
    Q = sample_qso(3, 1.0, seed)
    Qe = perturb(Q, eps)
    assert hat_du_exact(Q, Qe)[0] <= 2.0 * eps + 1e-12
    assert delta1_exact(Qe)[0] <= 2.0 * (1.0 - eps) + 1e-12


def test_perturb_distance_is_attained_at_vertex_columns():
    Q = make_q_diamond(Density.vertex(4, 0))
    eps = 0.2
    hat, _ = hat_du_exact(Q, perturb(Q, eps))
    assert hat == pytest.approx(eps * 2.0 * (1.0 - 1.0 / 4))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_perturbed_windows_decay(n):
    eps = 0.1
    Qe = perturb(sample_qso(4, 0.5, 21), eps)
    for f in random_densities(4, 8, n):
        assert delta_coeff(window(Qe, f, 0, n).product) <= 2.0 * (1.0 - eps) ** n + 1e-9


def test_perturb_preconditions(random_qso):
    with pytest.raises(InvalidParameter):
        perturb(random_qso, 0.0)
    with pytest.raises(InvalidParameter):
        perturb(random_qso, 1.0)
    with pytest.raises(DimensionMismatch):
        perturb(random_qso, 0.5, Density.uniform(2))
    with pytest.raises(PreconditionViolation):
        perturb(make_q_flat(3), 0.5)


def test_sample_qso_is_reproducible_and_symmetric():
    Q = sample_qso(4, 1.0, 5)
    assert Q == sample_qso(4, 1.0, 5)
    assert Q != sample_qso(4, 1.0, 6)
    np.testing.assert_array_equal(Q.q, Q.q.transpose(1, 0, 2))
    assert sample_qso(1, 1.0, 0).q.tolist() == [[[1.0]]]


def test_sample_stochastic_matrix():
    P = sample_stochastic_matrix(3, 1.0, 0)
    np.testing.assert_allclose(P.matrix.sum(axis=0), 1.0)
    assert sample_stochastic_matrix(1, 1.0, 0) == StochasticMatrix.identity(1)


@pytest.mark.slow
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_perturbed_decay_at_scale(eps):
    for seed in range(100):
        Q = sample_qso(4, 1.0, seed)
        Qe = perturb(Q, eps)
        assert hat_du_exact(Q, Qe)[0] <= 2.0 * eps + 1e-12
        starts = [Density.vertex(4, i) for i in range(4)] + random_densities(4, 2, seed)
        for f in starts:
            for n in (1, 2, 5, 10, 20):
                bound = 2.0 * (1.0 - eps) ** n + 1e-9
                assert delta_coeff(window(Qe, f, 0, n).product) <= bound


@pytest.mark.slow
def test_markov_averaging_decay_at_scale():
    for seed in range(20):
        Q = make_markov_averaging(sample_stochastic_matrix(3, 0.5, seed))
        starts = [Density.vertex(3, i) for i in range(3)] + random_densities(3, 5, seed)
        for f in starts:
            for n in range(1, 21):
                assert delta_coeff(window(Q, f, 0, n).product) <= 2.0 * 0.5**n + 1e-9
        assert delta_n_estimate(Q, 3, starts=1, rng_seed=seed) <= 2.0 * 0.5**3 + 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("d,split", [(4, 2), (6, 3), (6, 2)])
def test_block_example_never_mixes(d, split):
    Q = make_block_example(d, split)
    witness = find_invariant_blocks(Q)
    assert witness is not None
    seed = Density.vertex(d, witness.seed)
    for n in range(1, 21):
        assert delta_coeff(window(Q, seed, 0, n).product) == pytest.approx(2.0)
    report = classify_quasi_mixing(Q, horizon=20, starts=0, profile=False)
    assert report.verdict is Verdict.CERTIFIED_NO
