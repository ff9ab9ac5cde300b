import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolab.core import (
    AsymmetricEntry,
    Density,
    DimensionMismatch,
    InvalidOperator,
    InvalidParameter,
    NegativeEntry,
    NotInvariantSeed,
    PreconditionViolation,
    Qso,
    RowNotStochastic,
    SignedVector,
    StochasticMatrix,
    apply,
    apply_signed,
    check_monotone,
    diag,
    find_invariant,
    iterate,
    l1_distance,
    validate,
)
from qsolab.operators import make_markov_averaging, make_q_diamond, sample_qso

from .conftest import random_densities

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def uniform_array(d):
    return np.full((d, d, d), 1.0 / d)


def test_validate_accepts_uniform():
    Q = validate(uniform_array(3))
    assert isinstance(Q, Qso)
    assert Q.dim == 3 and Q.symmetric
    assert not Q.q.flags.writeable


@pytest.mark.parametrize("shape", [(2, 2), (2, 3, 2), (0, 0, 0)])
def test_validate_rejects_shapes(shape):
    with pytest.raises(InvalidOperator):
        validate(np.zeros(shape))


def test_negative_entry_is_located():
    q = uniform_array(2)
    q[1, 0] = [1.5, -0.5]
    with pytest.raises(NegativeEntry) as excinfo:
        validate(q, symmetric_required=False)
    assert excinfo.value.index == (1, 0, 1)
    assert "i=2,j=1,k=2" in str(excinfo.value)


def test_row_not_stochastic_is_located():
    q = uniform_array(2)
    q[0, 1] = [0.5, 0.6]
    q[1, 0] = [0.5, 0.6]
    with pytest.raises(RowNotStochastic) as excinfo:
        validate(q)
    assert excinfo.value.index == (0, 1)


def test_asymmetric_entry():
    q = uniform_array(2)
    q[0, 1] = [1.0, 0.0]
    with pytest.raises(AsymmetricEntry) as excinfo:
        validate(q)
    assert excinfo.value.index[:2] == (0, 1)
    assert validate(q, symmetric_required=False).symmetric is False


def test_small_drift_is_renormalized():
    q = uniform_array(2)
    q[0, 0] = [0.5 + 5e-10, 0.5]
    Q = validate(q)
    assert Q.max_renormalization == pytest.approx(5e-10, rel=1e-3)
    np.testing.assert_allclose(Q.q.sum(axis=2), 1.0, atol=1e-15)


def test_validate_is_idempotent(random_qso):
    again = validate(random_qso.q, symmetric_required=True)
    assert again == random_qso
    assert again.max_renormalization <= 1e-13


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_apply_is_a_density_and_symmetric(seed):
    Q = sample_qso(4, 0.7, seed)
    f, g = random_densities(4, 2, seed)
    out = apply(Q, f, g)
    assert out.values.min() >= 0.0
    assert out.values.sum() == pytest.approx(1.0, abs=1e-12)
    assert apply(Q, g, f) == out


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_apply_signed_is_norm_bounded(seed):
    Q = sample_qso(3, 1.0, seed)
    f, g, h = random_densities(3, 3, seed)
    w = f - g
    assert apply_signed(Q, w, h).norm() <= w.norm() + 1e-12


def test_apply_dimension_mismatch(random_qso):
    with pytest.raises(DimensionMismatch):
        apply(random_qso, Density.uniform(2), Density.uniform(3))


def test_check_monotone(random_qso):
    f, g = random_densities(3, 2, 0)
    bump = SignedVector([0.1, 0.0, 0.3])
    assert check_monotone(random_qso, f, g, f.signed() + bump, g.signed())
    assert check_monotone(random_qso, f, g, f.signed(), g.signed() + bump)
    with pytest.raises(PreconditionViolation):
        check_monotone(random_qso, f, g, f.signed() * 0.5, g.signed())


def test_iterate_trajectory(random_qso):
    f = Density.uniform(3)
    trajectory = iterate(random_qso, f, 4)
    assert len(trajectory) == 5
    assert trajectory[0] is f
    assert trajectory[2] == diag(random_qso, trajectory[1])
    assert iterate(random_qso, f, 0) == [f]
    with pytest.raises(InvalidParameter):
        iterate(random_qso, f, -1)


def test_find_invariant_of_diamond():
    anchor = Density([0.2, 0.3, 0.5])
    fixed = find_invariant(make_q_diamond(anchor), Density.vertex(3, 0))
    np.testing.assert_allclose(fixed.values, anchor.values, atol=1e-15)


def test_find_invariant_fails_on_oscillation():
    swap = make_markov_averaging(StochasticMatrix([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(NotInvariantSeed):
        find_invariant(swap, Density.vertex(2, 0), max_iter=25)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, a=st.floats(min_value=0.0, max_value=1.0))
def test_apply_is_bilinear(seed, a):
    Q = sample_qso(4, 1.0, seed)
    x, x2, y = random_densities(4, 3, seed)
    mixed = apply(Q, x.mix(x2, a), y).values
    expected = a * apply(Q, x, y).values + (1.0 - a) * apply(Q, x2, y).values
    np.testing.assert_allclose(mixed, expected, atol=1e-12)
    np.testing.assert_allclose(apply(Q, y, x.mix(x2, a)).values, expected, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, c=st.floats(min_value=-3.0, max_value=3.0))
def test_apply_signed_is_linear_in_the_signed_argument(seed, c):
    Q = sample_qso(3, 0.5, seed)
    f, g, h, y = random_densities(3, 4, seed)
    w1, w2 = f - g, h - g
    combined = apply_signed(Q, w1 + w2 * c, y).values
    expected = apply_signed(Q, w1, y).values + c * apply_signed(Q, w2, y).values
    np.testing.assert_allclose(combined, expected, atol=1e-12)
    np.testing.assert_allclose(
        apply_signed(Q, w1, y).values, apply(Q, f, y).values - apply(Q, g, y).values, atol=1e-12
    )


@settings(max_examples=50, deadline=None)
@given(seed=seeds, d=st.integers(min_value=2, max_value=6))
def test_diagonal_map_is_two_lipschitz(seed, d):
    Q = sample_qso(d, 0.3, seed)
    f, g = random_densities(d, 2, seed)
    assert l1_distance(diag(Q, f), diag(Q, g)) <= 2.0 * l1_distance(f, g) + 1e-12
