import itertools

import numpy as np
import pytest

from qsolab.core import (
    Density,
    InvalidParameter,
    NumericAssertionError,
    PreconditionViolation,
    StochasticMatrix,
)
from qsolab.evaluation import (
    BallCertificate,
    QuasiCertificate,
    Verdict,
    chain_stability,
    check_diamond_ball,
    classify_quasi_mixing,
    delta1_exact,
    delta1_lipschitz_check,
    delta_coeff,
    delta_n_estimate,
    delta_n_profile,
    empirical_mixing,
    grid_certify,
    implied_horizon,
    openness_radius,
    quasi_equiv_check,
    sampled_image_diameter,
    norm_mixing_spot_check,
)
from qsolab.operators import make_q_diamond, make_q_flat, perturb, sample_qso

from .conftest import oscillating_qso


@pytest.fixture
def ball_qso():
    return perturb(sample_qso(3, 1.0, 7), 0.9)


def test_delta_coeff_extremes():
    assert delta_coeff(StochasticMatrix.identity(3)) == 2.0
    assert delta_coeff(StochasticMatrix.rank_one(Density([0.2, 0.8]))) == 0.0


def test_delta1_matches_brute_force(random_qso):
    value, (m, i, j) = delta1_exact(random_qso)
    q = random_qso.q
    brute = max(
        np.abs(q[a, b] - q[a, c]).sum() for a, b, c in itertools.product(range(3), repeat=3)
    )
    assert value == pytest.approx(brute)
    assert np.abs(q[m, i] - q[m, j]).sum() == pytest.approx(value)


def test_delta1_of_block_example(block_qso):
    value, (m, i, j) = delta1_exact(block_qso)
    assert value == 2.0
    assert m in (2, 3)


def test_first_estimate_is_exact(random_qso):
    assert delta_n_estimate(random_qso, 1, starts=1) == pytest.approx(delta1_exact(random_qso)[0], abs=1e-9)
    with pytest.raises(InvalidParameter):
        delta_n_estimate(random_qso, 0)


def test_profile_is_monotone(random_qso):
    profile = delta_n_profile(random_qso, 4, starts=1, rng_seed=3)
    assert [n for n, _ in profile] == [1, 2, 3, 4]
    values = [v for _, v in profile]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert values[0] == pytest.approx(delta1_exact(random_qso)[0], abs=1e-9)
    d1 = delta1_exact(random_qso)[0]
    for n, v in profile:
        assert v <= 2.0 * (d1 / 2.0) ** n + 1e-9


def test_quasi_certificate_bound():
    cert = QuasiCertificate(horizon=2, epsilon=0.5)
    assert cert.rate == 0.75
    assert [cert.bound(j) for j in (1, 2, 3, 4, 5)] == [2.0, 2.0, 1.5, 1.5, 1.125]


def test_perturbed_operator_is_certified(perturbed_qso):
    report = classify_quasi_mixing(perturbed_qso, horizon=3, starts=1)
    assert report.verdict is Verdict.CERTIFIED_YES
    assert report.certificate.source == "delta1"
    assert report.certificate.epsilon == pytest.approx(2.0 - report.delta1_exact)
    assert report.delta1_exact <= 1.8 + 1e-12
    for n, value in report.delta_n_lower:
        assert value <= report.certificate.bound(n) + 1e-9
    row = report.as_dict()
    assert row["verdict"] == "CertifiedYes"
    assert row["openness_radius_hat_du"] == pytest.approx(report.certificate.epsilon / 2.0)
    assert row["openness_radius_du"] == pytest.approx(report.certificate.epsilon / 8.0)


def test_block_example_is_certified_no(block_qso):
    report = classify_quasi_mixing(block_qso, horizon=2, starts=1)
    assert report.verdict is Verdict.CERTIFIED_NO
    assert report.structure is not None
    assert report.certificate is None
    assert report.delta_n_lower[-1][1] == pytest.approx(2.0)
    assert report.as_dict()["block_B2"] == "3 4"


def test_likely_yes_without_certificate():
    Q = oscillating_qso()
    report = classify_quasi_mixing(Q, horizon=3, starts=1, profile=False)
    assert report.delta1_exact == 2.0
    assert report.verdict is Verdict.LIKELY_YES
    assert [n for n, _ in report.delta_n_lower] == [3]


def test_grid_certificate():
    Q = oscillating_qso()
    upper = grid_certify(Q, 3, resolution=64)
    assert upper >= delta_n_estimate(Q, 3, starts=1)
    assert upper < 2.0
    report = classify_quasi_mixing(Q, horizon=3, starts=1, grid=True)
    assert report.verdict is Verdict.CERTIFIED_YES
    assert report.certificate.source == "grid"
    assert report.certificate.horizon == 3
    assert report.openness_radius_hat_du is None


def test_grid_limits(random_qso):
    with pytest.raises(InvalidParameter):
        grid_certify(sample_qso(4, 1.0, 0), 2)
    with pytest.raises(InvalidParameter):
        grid_certify(random_qso, 5)


def test_nonsymmetric_operators_are_unknown():
    report = classify_quasi_mixing(make_q_flat(3), horizon=2, starts=0)
    assert report.verdict is Verdict.UNKNOWN
    assert report.certificate is None
    assert not report.symmetric


def test_diamond_ball():
    anchor = Density([0.5, 0.25, 0.25])
    ball = check_diamond_ball(make_q_diamond(anchor))
    assert isinstance(ball, BallCertificate)
    assert ball.epsilon == 0.0 and ball.rate == 0.0
    assert check_diamond_ball(make_q_diamond(anchor), anchor=Density.vertex(3, 0)) is None


def test_ball_certificate_bounds_the_image_diameter(ball_qso):
    ball = check_diamond_ball(ball_qso)
    assert ball is not None and ball.epsilon < 1.0 / 3.0
    for n in (1, 2, 4):
        assert sampled_image_diameter(ball_qso, n, pairs=20) <= ball.diameter_bound(n) + 1e-12


def test_no_ball_for_block_example(block_qso):
    assert check_diamond_ball(block_qso) is None


def test_implied_horizon():
    assert implied_horizon(0.0, 1e-6) == 4
    assert implied_horizon(0.5, 1e-6) == 26
    assert implied_horizon(0.5, 1e-3) <= implied_horizon(0.5, 1e-6)
    with pytest.raises(InvalidParameter):
        implied_horizon(1.0, 1e-6)
    with pytest.raises(InvalidParameter):
        implied_horizon(0.5, 0.0)


def test_norm_mixing_at_implied_horizon(ball_qso):
    tol = 1e-6
    ball = check_diamond_ball(ball_qso)
    assert norm_mixing_spot_check(ball_qso, implied_horizon(ball.rate, tol), tol)


def test_spot_check_requires_ball_certificate(block_qso):
    with pytest.raises(PreconditionViolation):
        norm_mixing_spot_check(block_qso, 5)


def test_quasi_equivalence_on_block_example(block_qso):
    d_full, d_anchored = quasi_equiv_check(block_qso, 2, starts=1)
    assert d_full == pytest.approx(2.0)
    assert d_anchored == pytest.approx(2.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quasi_equivalence_sandwich(n):
    Q = sample_qso(3, 0.3, n)
    d_full, d_anchored = quasi_equiv_check(Q, n, starts=1, rng_seed=n)
    assert d_anchored <= d_full + 1e-9
    assert d_full <= 2.0 * d_anchored + 1e-9


def test_empirical_mixing(ball_qso, block_qso):
    report = empirical_mixing(ball_qso, 40, seeds=4, tol=1e-6)
    assert report.verdict(report.norm_residual) == "consistent"
    assert report.as_dict()["empirical_strong_almost"] == "consistent"
    block = empirical_mixing(block_qso, 5, seeds=4)
    assert block.norm_residual >= 1.0
    assert block.as_dict()["empirical_norm"] == "inconsistent"
    with pytest.raises(InvalidParameter):
        empirical_mixing(ball_qso, 0)


def test_classify_with_empirical_checks(ball_qso):
    report = classify_quasi_mixing(ball_qso, horizon=40, starts=0, profile=False, empirical=True)
    assert report.verdict is Verdict.CERTIFIED_YES
    assert report.norm_mixing_ball is not None
    assert report.norm_mixing is True
    assert report.as_dict()["norm_mixing_spot_check"] is True


def test_chain_stability(ball_qso, block_qso):
    stable = chain_stability(ball_qso, Density.uniform(3), 10, samples=4)
    assert max(stable.uniform, stable.almost_uniform, stable.strong, stable.strong_almost) <= 1e-6
    frozen = chain_stability(block_qso, Density.vertex(4, 2), 4, samples=4)
    assert frozen.almost_uniform == pytest.approx(2.0)
    assert frozen.uniform == pytest.approx(2.0)


def test_openness_radius(perturbed_qso, block_qso):
    gap = 2.0 - delta1_exact(perturbed_qso)[0]
    assert openness_radius(perturbed_qso) == pytest.approx((gap / 2.0, gap / 8.0))
    assert openness_radius(block_qso) == (0.0, 0.0)


def test_delta1_is_two_lipschitz(random_qso, perturbed_qso):
    gap, bound = delta1_lipschitz_check(random_qso, perturbed_qso)
    assert gap <= bound + 1e-12


def test_certificate_violation_is_reported(monkeypatch, perturbed_qso):
    import qsolab.evaluation.mixing as mixing

    monkeypatch.setattr(mixing, "delta_n_profile", lambda *a, **k: [(1, 2.0), (2, 2.0)])
    with pytest.raises(NumericAssertionError):
        classify_quasi_mixing(perturbed_qso, horizon=2, starts=0)


@pytest.mark.slow
def test_quasi_equivalence_at_scale():
    for seed in range(100):
        Q = sample_qso(3, 1.0, seed)
        for n in range(1, 6):
            d_full, d_anchored = quasi_equiv_check(Q, n, starts=0, rng_seed=seed)
            assert d_anchored <= d_full + 1e-9
            assert d_full <= 2.0 * d_anchored + 1e-9


@pytest.mark.slow
def test_ball_certificates_at_scale():
    tol = 1e-6
    for seed in range(50):
        Q = perturb(sample_qso(3 + seed % 2, 1.0, seed), 0.9)
        ball = check_diamond_ball(Q)
        assert ball is not None and ball.epsilon < 1.0 / 3.0
        for n in range(1, 16):
            diameter = sampled_image_diameter(Q, n, pairs=100, rng_seed=seed)
            assert diameter <= ball.diameter_bound(n) + 1e-9
        assert norm_mixing_spot_check(Q, implied_horizon(ball.rate, tol), tol)
