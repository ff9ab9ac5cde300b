"""
Mixing diagnostics for quadratic stochastic operators.

The window coefficient of a seed ``f`` at horizon ``n`` is

    c_n(f) = delta_coeff(P_f^{[0, n]})

and ``delta_n = sup_f c_n(f)``. The operator is quasi-mixing when
``delta_n -> 0``; since ``delta(AB) <= delta(A) delta(B) / 2`` it suffices that
``delta_n < 2`` for one ``n``. Only ``delta_1`` has a closed form, so

* a ``delta_1`` gap below 2, a structural block witness or the grid bound are
  certificates (seed independent);
* the sampled estimates of ``delta_n`` for ``n >= 2`` are lower bounds and can
  only raise or lower confidence.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.chain import StochasticMatrix, window
from ..core.exceptions import InvalidParameter, NumericAssertionError, PreconditionViolation
from ..core.qso import Qso, diag, iterate
from ..core.simplex import (
    Density,
    RngLike,
    as_generator,
    l1_distance,
    maximize_over_simplex,
    simplex_grid,
)
from ..operators.zoo import make_q_diamond
from ..utils.logger import log_every_n_seconds, log_first_n
from .metrics import hat_du_exact
from .structure import BlockWitness, find_invariant_blocks

__all__ = [
    "Verdict",
    "QuasiCertificate",
    "BallCertificate",
    "EmpiricalReport",
    "ChainStability",
    "MixingReport",
    "LIKELY_THRESHOLD",
    "delta_coeff",
    "delta1_exact",
    "window_coefficient",
    "delta_n_estimate",
    "delta_n_profile",
    "grid_certify",
    "classify_quasi_mixing",
    "check_diamond_ball",
    "sampled_image_diameter",
    "empirical_mixing",
    "implied_horizon",
    "norm_mixing_spot_check",
    "quasi_equiv_check",
    "chain_stability",
    "openness_radius",
    "delta1_lipschitz_check",
]

logger = logging.getLogger(__name__)

CERT_TOL = 1e-9
LIKELY_THRESHOLD = 2.0 - 0.05
_GRID_MAX_DIM = 3
_GRID_MAX_HORIZON = 4


class Verdict(str, enum.Enum):
    CERTIFIED_YES = "CertifiedYes"
    CERTIFIED_NO = "CertifiedNo"
    LIKELY_YES = "LikelyYes"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QuasiCertificate:
    """
    ``delta_horizon <= 2 − epsilon`` holds exactly. Then
    ``delta_j <= 2 * rate ** floor((j − 1) / horizon)`` with ``rate = 1 − epsilon / 2``.
    """

    horizon: int
    epsilon: float
    source: str = "delta1"

    @property
    def rate(self) -> float:
        return 1.0 - self.epsilon / 2.0

    def bound(self, j: int) -> float:
        return 2.0 * self.rate ** ((j - 1) // self.horizon)


@dataclass(frozen=True)
class BallCertificate:
    """
    ``hat_du(Q, Q◇_anchor) = epsilon < 1/3``: the diagonal map contracts with
    ``rate = 3 epsilon`` and ``diam Q^n(D) <= 2 rate^(n − 1)``.
    """

    epsilon: float
    rate: float
    anchor: Density

    def diameter_bound(self, n: int) -> float:
        return 2.0 * self.rate ** (n - 1)


@dataclass(frozen=True)
class EmpiricalReport:
    """
    Residuals at the final horizon over vertex and sampled seeds. Verdicts are
    "consistent" or "inconsistent" at ``tol``; they are never certificates.
    """

    horizon: int
    seeds: int
    tol: float
    norm_residual: float
    strong_residual: float
    strong_almost_residual: float
    quasi_residual: float
    limit: Density

    def verdict(self, residual: float) -> str:
        return "consistent" if residual <= self.tol else "inconsistent"

    def as_dict(self) -> dict:
        out = {}
        for name in ("norm", "strong", "strong_almost", "quasi"):
            residual = getattr(self, name + "_residual")
            out[f"empirical_{name}_residual"] = residual
            out[f"empirical_{name}"] = self.verdict(residual)
        return out


@dataclass(frozen=True)
class ChainStability:
    """
    Stability residuals of the chain seeded by one density, maximized over
    the window offsets. ``uniform`` and ``almost_uniform`` range over all
    arguments (vertex reduction), ``strong`` and ``strong_almost`` only over
    sampled ones.
    """

    uniform: float
    almost_uniform: float
    strong: float
    strong_almost: float


@dataclass(frozen=True)
class MixingReport:
    delta1_exact: float
    delta1_witness: Tuple[int, int, int]
    delta_n_lower: List[Tuple[int, float]]
    verdict: Verdict
    symmetric: bool
    certificate: Optional[QuasiCertificate] = None
    structure: Optional[BlockWitness] = None
    norm_mixing_ball: Optional[BallCertificate] = None
    empirical: Optional[EmpiricalReport] = None
    norm_mixing: Optional[bool] = None
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def openness_radius_hat_du(self) -> Optional[float]:
        if self.certificate is None or self.certificate.source != "delta1":
            return None
        return self.certificate.epsilon / 2.0

    def as_dict(self) -> dict:
        m, i, j = self.delta1_witness
        out = {
            "verdict": self.verdict.value,
            "symmetric": self.symmetric,
            "delta1": self.delta1_exact,
            "delta1_witness": f"{m + 1},{i + 1},{j + 1}",
        }
        for n, value in self.delta_n_lower:
            out[f"delta_{n}_lower"] = value
        if self.certificate is not None:
            out.update(
                certificate_source=self.certificate.source,
                certificate_horizon=self.certificate.horizon,
                certificate_eps=self.certificate.epsilon,
                certificate_rate=self.certificate.rate,
            )
            if self.openness_radius_hat_du is not None:
                out["openness_radius_hat_du"] = self.openness_radius_hat_du
                out["openness_radius_du"] = self.openness_radius_hat_du / 4.0
        if self.structure is not None:
            out.update(self.structure.as_dict())
        if self.norm_mixing_ball is not None:
            out.update(
                ball_eps=self.norm_mixing_ball.epsilon,
                ball_rate=self.norm_mixing_ball.rate,
                ball_anchor=" ".join("{:.6g}".format(x) for x in self.norm_mixing_ball.anchor.values),
            )
        if self.empirical is not None:
            out.update(self.empirical.as_dict())
        if self.norm_mixing is not None:
            out["norm_mixing_spot_check"] = self.norm_mixing
        out.update(self.extra)
        return out


def delta_coeff(M: StochasticMatrix) -> float:
    """
    Largest l1 distance between two columns, i.e. ``sup ‖Mg − Mh‖₁`` over
    densities ``g, h``. In ``[0, 2]``; 0 iff all columns agree.
    """
    cols = M.matrix.T
    spread = np.abs(cols[:, None, :] - cols[None, :, :]).sum(axis=2)
    return float(min(spread.max(), 2.0))


def delta1_exact(Q: Qso) -> Tuple[float, Tuple[int, int, int]]:
    """
    ``sup_{f,g,h} ‖Q(f, g) − Q(f, h)‖₁ = max_{m,i,j} ‖q[m, i] − q[m, j]‖₁``;
    the witness ``(m, i, j)`` is the lexicographically first maximizer.
    """
    best, witness = -1.0, (0, 0, 0)
    for m in range(Q.dim):
        cols = Q.q[m]
        spread = np.abs(cols[:, None, :] - cols[None, :, :]).sum(axis=2)
        i, j = np.unravel_index(int(np.argmax(spread)), spread.shape)
        if spread[i, j] > best:
            best, witness = float(spread[i, j]), (m, int(i), int(j))
    return min(best, 2.0), witness


def window_coefficient(Q: Qso, n: int):
    """The map ``f -> c_n(f)``."""
    if n < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {n!r}")

    def phi(f: Density) -> float:
        return delta_coeff(window(Q, f, 0, n).product)

    return phi


def delta_n_estimate(
    Q: Qso,
    n: int,
    starts: int = 8,
    rng_seed: RngLike = 0,
    *,
    extra_starts: Sequence[Density] = (),
) -> float:
    """
    Lower bound on ``delta_n`` by multi-start search over seeds. The start set
    always contains every vertex, so ``n = 1`` reproduces :func:`delta1_exact`.
    """
    value, _ = maximize_over_simplex(
        window_coefficient(Q, n), Q.dim, starts, rng_seed, extra_starts=extra_starts
    )
    return value


def delta_n_profile(
    Q: Qso, horizon: int, starts: int = 8, rng_seed: RngLike = 0
) -> List[Tuple[int, float]]:
    """
    Estimates of ``delta_n`` for ``n = 1..horizon``, non-increasing in ``n``.

    Each horizon is searched independently; the estimate at ``n`` is then the
    best value of ``c_n`` over the maximizers found at horizons ``>= n``.
    Since ``c_n(f) >= c_{n+1}(f)`` for every seed, the profile is monotone,
    and each entry is an evaluated coefficient, hence a lower bound.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {horizon!r}")
    seed = rng_seed
    if isinstance(rng_seed, np.random.Generator):
        seed = int(rng_seed.integers(2**63))
    found = []
    for n in range(1, horizon + 1):
        # same seed per horizon: identical random start points
        value, arg = maximize_over_simplex(window_coefficient(Q, n), Q.dim, starts, seed)
        found.append((value, arg))
        log_every_n_seconds(logging.INFO, f"delta_n search at n={n}/{horizon}: {value:.6f}", n=5)

    profile = []
    running = -np.inf
    pool: List[Density] = []
    for n in range(horizon, 0, -1):
        value, arg = found[n - 1]
        pool.append(arg)
        phi = window_coefficient(Q, n)
        best = max([value] + [phi(p) for p in pool[:-1]])
        running = max(running, best)
        profile.append((n, float(running)))
    profile.reverse()
    return profile


def grid_certify(Q: Qso, n: int, resolution: int = 64) -> float:
    """
    Certified upper bound on ``delta_n`` for ``d <= 3`` and ``n <= 4``.

    ``c_n`` is Lipschitz in the seed with constant ``L = 2 (2^n − 1)`` (the
    diagonal map is 2-Lipschitz, errors of the ``n`` steps add up) and every
    density lies within l1 distance ``d / resolution`` of a grid point, so
    ``delta_n <= max_grid c_n + L d / resolution``.
    """
    if Q.dim > _GRID_MAX_DIM or not 1 <= n <= _GRID_MAX_HORIZON:
        raise InvalidParameter(
            f"grid certification needs d <= {_GRID_MAX_DIM} and 1 <= n <= {_GRID_MAX_HORIZON}, "
            f"got d={Q.dim}, n={n}"
        )
    phi = window_coefficient(Q, n)
    best = max(phi(p) for p in simplex_grid(Q.dim, resolution))
    lipschitz = 2.0 * (2**n - 1)
    return float(best + lipschitz * Q.dim / resolution)


def check_diamond_ball(Q: Qso, anchor: Optional[Density] = None) -> Optional[BallCertificate]:
    """
    Norm-mixing certificate from closeness to a constant operator.

    With ``anchor`` given only that anchor is tried; otherwise the image of the
    barycenter and every vertex are swept and the smallest distance kept.
    Returns None when no anchor is within ``1/3``, which refutes nothing.
    """
    if anchor is not None:
        anchors = [anchor]
    else:
        anchors = [diag(Q, Density.uniform(Q.dim))] + [Density.vertex(Q.dim, i) for i in range(Q.dim)]
    best = None
    for v in anchors:
        eps, _ = hat_du_exact(Q, make_q_diamond(v))
        if best is None or eps < best[0]:
            best = (eps, v)
    eps, v = best
    if eps < 1.0 / 3.0:
        return BallCertificate(epsilon=eps, rate=3.0 * eps, anchor=v)
    return None


def _seeds(d: int, count: int, rng) -> List[Density]:
    seeds = [Density.vertex(d, i) for i in range(d)]
    if d > 1:
        seeds += [Density._wrap(rng.dirichlet(np.ones(d))) for _ in range(count)]
    return seeds


def _pairwise_max(points: Sequence[Density]) -> float:
    arr = np.stack([p.values for p in points])
    return float(np.abs(arr[:, None, :] - arr[None, :, :]).sum(axis=2).max())


def sampled_image_diameter(Q: Qso, n: int, pairs: int = 100, rng_seed: RngLike = 0) -> float:
    """
    Largest ``‖Q^n(g) − Q^n(h)‖₁`` over all vertex pairs and ``pairs`` random pairs.
    """
    rng = as_generator(rng_seed)
    d = Q.dim
    diameter = _pairwise_max([iterate(Q, Density.vertex(d, i), n)[-1] for i in range(d)])
    for _ in range(pairs if d > 1 else 0):
        g = Density._wrap(rng.dirichlet(np.ones(d)))
        h = Density._wrap(rng.dirichlet(np.ones(d)))
        diameter = max(diameter, l1_distance(iterate(Q, g, n)[-1], iterate(Q, h, n)[-1]))
    return diameter


def empirical_mixing(
    Q: Qso, horizon: int, seeds: int = 16, rng_seed: RngLike = 0, tol: float = 1e-6
) -> EmpiricalReport:
    """
    Empirical residuals of the mixing classes at ``horizon``:

    * norm: ``max_g ‖Q^n(g) − f̄‖₁`` with ``f̄`` the mean endpoint;
    * strong: ``max_g ‖Q^n(g) − Q^{n−1}(g)‖₁``, trajectories still moving;
    * strong-almost: ``max ‖Q^n(g) − Q^n(h)‖₁`` over seed pairs;
    * quasi: :func:`delta_n_estimate` at the horizon.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {horizon!r}")
    if not tol > 0:
        raise InvalidParameter(f"tol must be positive, got {tol!r}")
    rng = as_generator(rng_seed)
    trajectories = [iterate(Q, g, horizon) for g in _seeds(Q.dim, seeds, rng)]
    ends = [t[-1] for t in trajectories]
    limit = Density._wrap(np.mean([e.values for e in ends], axis=0))
    norm = max(l1_distance(e, limit) for e in ends)
    strong = max(l1_distance(t[-1], t[-2]) for t in trajectories)
    strong_almost = _pairwise_max(ends)
    quasi = delta_n_estimate(Q, horizon, starts=seeds, rng_seed=rng)
    return EmpiricalReport(
        horizon=horizon,
        seeds=len(ends),
        tol=tol,
        norm_residual=norm,
        strong_residual=strong,
        strong_almost_residual=strong_almost,
        quasi_residual=quasi,
        limit=limit,
    )


def implied_horizon(rate: float, tol: float) -> int:
    """
    A horizon at which a ball-certified operator with contraction ``rate``
    passes :func:`norm_mixing_spot_check` at ``tol``: the smallest ``N`` with
    ``2 rate^(N − 1) <= tol / 4``, plus the largest window offset.
    """
    if not 0.0 <= rate < 1.0:
        raise InvalidParameter(f"rate must lie in [0, 1), got {rate!r}")
    if not tol > 0:
        raise InvalidParameter(f"tol must be positive, got {tol!r}")
    if rate == 0.0:
        return 4
    steps = math.log(tol / 8.0) / math.log(rate)
    n = max(1, math.ceil(steps) + 1)
    while 2.0 * rate ** (n - 1) > tol / 4.0:
        n += 1
    while n > 1 and 2.0 * rate ** (n - 2) <= tol / 4.0:
        n -= 1
    return n + 2


def norm_mixing_spot_check(Q: Qso, horizon: int, tol: float = 1e-6, offsets: Sequence[int] = (0, 1, 2)) -> bool:
    """
    Check that every window ``P_h^{[m, horizon]}`` of every vertex seed ``h``
    sends every vertex argument within ``tol`` of the common limit ``f̄``,
    for the offsets ``m < horizon``.

    Raises:
        PreconditionViolation: when the vertex endpoints ``Q^horizon(e_i)``
            are not within ``tol`` of their mean (not norm mixing at ``tol``).
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {horizon!r}")
    d = Q.dim
    vertices = [Density.vertex(d, i) for i in range(d)]
    ends = [iterate(Q, e, horizon)[-1] for e in vertices]
    limit = Density._wrap(np.mean([e.values for e in ends], axis=0))
    spread = max(l1_distance(e, limit) for e in ends)
    if spread > tol:
        raise PreconditionViolation(
            f"operator is not norm mixing at tol={tol}: endpoint residual {spread:.3e} at n={horizon}"
        )
    ok = True
    for m in (m for m in offsets if m < horizon):
        for h in vertices:
            product = window(Q, h, m, horizon).product.matrix
            residual = float(np.abs(product - limit.values[:, None]).sum(axis=0).max())
            if residual > tol:
                logger.info(
                    "window [{}, {}] of a vertex seed misses the limit by {:.3e}".format(m, horizon, residual)
                )
                ok = False
    return ok


def quasi_equiv_check(
    Q: Qso, n: int, starts: int = 8, rng_seed: RngLike = 0
) -> Tuple[float, float]:
    """
    ``(d_full, d_anchored)`` with ``d_full`` estimating ``sup_{f,g,h}`` of the
    window output difference and ``d_anchored`` the version with ``h = f``.
    The argmaxes of both searches are cross-evaluated, so
    ``d_anchored <= d_full <= 2 d_anchored`` holds exactly.
    """
    full_phi = window_coefficient(Q, n)

    def anchored_phi(f: Density) -> float:
        product = window(Q, f, 0, n).product.matrix
        end = product @ f.values
        return float(np.abs(product - end[:, None]).sum(axis=0).max())

    full, f1 = maximize_over_simplex(full_phi, Q.dim, starts, rng_seed)
    anchored, f2 = maximize_over_simplex(anchored_phi, Q.dim, starts, rng_seed)
    d_full = max(full, full_phi(f2))
    d_anchored = max(anchored, anchored_phi(f1))
    if not d_anchored <= d_full + CERT_TOL or not d_full <= 2.0 * d_anchored + CERT_TOL:
        raise NumericAssertionError(
            f"quasi-mixing sandwich violated: d_full={d_full!r}, d_anchored={d_anchored!r}"
        )
    return d_full, d_anchored


def chain_stability(
    Q: Qso,
    seed: Density,
    horizon: int,
    offsets: Sequence[int] = (0, 1, 2),
    samples: int = 16,
    rng_seed: RngLike = 0,
) -> ChainStability:
    """
    Stability of the chain seeded by ``seed`` over windows ``[m, m + horizon]``.
    The reference state of a window is the diagonal iterate it ends at.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {horizon!r}")
    rng = as_generator(rng_seed)
    d = Q.dim
    sampled = np.stack([rng.dirichlet(np.ones(d)) for _ in range(samples)]) if d > 1 else np.ones((1, 1))
    uniform = almost_uniform = strong = strong_almost = 0.0
    for m in offsets:
        win = window(Q, seed, m, m + horizon)
        product = win.product.matrix
        reference = diag(Q, win.trajectory[-1]).values
        uniform = max(uniform, float(np.abs(product - reference[:, None]).sum(axis=0).max()))
        almost_uniform = max(almost_uniform, delta_coeff(win.product))
        images = sampled @ product.T
        strong = max(strong, float(np.abs(images - reference[None, :]).sum(axis=1).max()))
        strong_almost = max(
            strong_almost, float(np.abs(images[:, None, :] - images[None, :, :]).sum(axis=2).max())
        )
    return ChainStability(uniform, almost_uniform, strong, strong_almost)


def openness_radius(Q: Qso) -> Tuple[float, float]:
    """
    Radii of the balls around ``Q`` on which the ``delta_1`` certificate
    persists: ``(gap / 2 in hat_du, gap / 8 in du)`` with ``gap = 2 − delta_1``.
    Both are 0 when ``delta_1 = 2``.
    """
    gap = max(0.0, 2.0 - delta1_exact(Q)[0])
    return gap / 2.0, gap / 8.0


def delta1_lipschitz_check(Q1: Qso, Q2: Qso) -> Tuple[float, float]:
    """``(|delta_1(Q1) − delta_1(Q2)|, 2 hat_du(Q1, Q2))``; the first never exceeds the second."""
    gap = abs(delta1_exact(Q1)[0] - delta1_exact(Q2)[0])
    return gap, 2.0 * hat_du_exact(Q1, Q2)[0]


def classify_quasi_mixing(
    Q: Qso,
    horizon: int = 10,
    starts: int = 8,
    rng_seed: RngLike = 0,
    *,
    grid: bool = False,
    grid_resolution: int = 64,
    profile: bool = True,
    empirical: bool = False,
    tol: float = 1e-6,
) -> MixingReport:
    """
    Classify ``Q`` as quasi-mixing or not.

    * ``CertifiedYes``: ``delta_1 < 2 − 1e-9`` (or, with ``grid``, the grid bound
      at ``min(horizon, 4)`` is below 2);
    * ``CertifiedNo``: :func:`find_invariant_blocks` returns a witness;
    * ``LikelyYes``: the estimate at ``horizon`` is below ``2 − 0.05``;
    * ``Unknown`` otherwise, and always for nonsymmetric operators, for which
      values are computed but no certificate is issued.

    With ``profile`` the whole non-increasing sequence of estimates is
    reported; without it, estimates are only computed when needed.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be at least 1, got {horizon!r}")
    d1, witness = delta1_exact(Q)
    estimates: List[Tuple[int, float]] = []
    if profile:
        estimates = delta_n_profile(Q, horizon, starts, rng_seed)

    certificate = None
    structure = None
    ball = None
    verdict = Verdict.UNKNOWN

    if not Q.symmetric:
        log_first_n(
            logging.WARNING,
            "operator is not symmetric: values are reported but no certificate is issued",
            key="message",
        )
    elif d1 < 2.0 - CERT_TOL:
        verdict = Verdict.CERTIFIED_YES
        certificate = QuasiCertificate(horizon=1, epsilon=2.0 - d1)
        ball = check_diamond_ball(Q)
    else:
        structure = find_invariant_blocks(Q)
        if structure is not None:
            verdict = Verdict.CERTIFIED_NO
        elif grid and Q.dim <= _GRID_MAX_DIM:
            n = min(horizon, _GRID_MAX_HORIZON)
            upper = grid_certify(Q, n, grid_resolution)
            if upper < 2.0 - CERT_TOL:
                verdict = Verdict.CERTIFIED_YES
                certificate = QuasiCertificate(horizon=n, epsilon=2.0 - upper, source="grid")

    if verdict is Verdict.UNKNOWN:
        if not estimates:
            estimates = [(horizon, delta_n_estimate(Q, horizon, starts, rng_seed))]
        if Q.symmetric and estimates[-1][1] < LIKELY_THRESHOLD:
            verdict = Verdict.LIKELY_YES

    if certificate is not None:
        for n, value in estimates:
            if value > certificate.bound(n) + CERT_TOL:
                raise NumericAssertionError(
                    f"estimate {value!r} at n={n} exceeds the certified bound {certificate.bound(n)!r}"
                )

    report_empirical = None
    norm_mixing = None
    if empirical:
        report_empirical = empirical_mixing(Q, horizon, starts, rng_seed, tol)
        if report_empirical.norm_residual <= tol:
            try:
                norm_mixing = norm_mixing_spot_check(Q, horizon, tol)
            except PreconditionViolation:
                norm_mixing = None

    logger.debug("classified d={} operator: {} (delta1={:.6f})".format(Q.dim, verdict.value, d1))
    return MixingReport(
        delta1_exact=d1,
        delta1_witness=witness,
        delta_n_lower=estimates,
        verdict=verdict,
        symmetric=Q.symmetric,
        certificate=certificate,
        structure=structure,
        norm_mixing_ball=ball,
        empirical=report_empirical,
        norm_mixing=norm_mixing,
    )
