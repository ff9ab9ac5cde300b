"""
Monte Carlo census of random operators.

Every sample draws a symmetric operator with Dirichlet columns, classifies it
and classifies its perturbations towards the uniform constant operator. The
perturbations always carry a ``delta_1`` certificate, so their CertifiedYes
fraction is exactly 1 for every radius; the raw fraction is the experimental
output.

Randomness: sample ``i`` uses only the substream ``substream_seed(seed, i)``,
so any row can be recomputed on its own and the CSV does not depend on the
worker count.
"""
import logging
import os
import time
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from p_tqdm import p_map, t_map

from ..core.exceptions import InvalidParameter
from ..core.qso import Qso
from ..data.io import write_rows_csv
from ..evaluation.evaluator import CensusEvaluator
from ..evaluation.metrics import hat_du_exact
from ..evaluation.mixing import MixingReport, Verdict, classify_quasi_mixing
from ..evaluation.testing import print_csv_format, verify_results
from ..operators.zoo import perturb, sample_qso
from ..utils.env import substream_seed, worker_count
from ..utils.logger import create_small_table

__all__ = [
    "CensusConfig",
    "CensusRow",
    "census_header",
    "census_row",
    "perturbation_sweep",
    "run_census",
]

logger = logging.getLogger(__name__)


@dataclass
class CensusConfig:
    """
    Attributes:
        dim: operator dimension ``d``.
        samples: number of sampled operators ``N``.
        alpha: Dirichlet concentration of the columns.
        horizon: horizon of the sampled estimate for operators without certificate.
        starts: random starts of the seed search.
        seed: master seed.
        epsilon_list: perturbation radii, each in ``(0, 1)``.
        out_path: census CSV path.
        threads: worker pool size (``$QSOLAB_THREADS`` caps it).
        record_timing: fill ``wall_time_ms``; the CSV is then no longer byte-reproducible.
        svg: also render the ``delta_1`` histogram next to the CSV.
    """

    dim: int = 5
    samples: int = 1000
    alpha: float = 1.0
    horizon: int = 20
    starts: int = 4
    seed: int = 0
    epsilon_list: Sequence[float] = (0.01, 0.05, 0.1, 0.3)
    out_path: str = "./output/census/census.csv"
    threads: Optional[int] = None
    record_timing: bool = False
    svg: bool = False

    def __post_init__(self):
        for name in ("dim", "samples", "horizon"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidParameter(f"{name} must be a positive integer, got {value!r}")
        if int(self.starts) != self.starts or self.starts < 0:
            raise InvalidParameter(f"starts must be a nonnegative integer, got {self.starts!r}")
        if not self.alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {self.alpha!r}")
        if self.seed < 0:
            raise InvalidParameter(f"seed must be nonnegative, got {self.seed!r}")
        self.epsilon_list = tuple(float(e) for e in self.epsilon_list)
        bad = [e for e in self.epsilon_list if not 0.0 < e < 1.0]
        if bad:
            raise InvalidParameter(f"epsilon_list must lie in (0, 1), got {bad}")
        if self.threads is not None and self.threads < 1:
            raise InvalidParameter(f"threads must be positive, got {self.threads!r}")


@dataclass
class CensusRow:
    sample_id: int
    seed: int
    delta1: float
    verdict: Verdict
    certificate_eps: Optional[float]
    nearest_certified_hat_du: Optional[float]
    eps_verdicts: Dict[float, Verdict] = field(default_factory=dict)
    wall_time_ms: Optional[float] = None

    @classmethod
    def from_report(
        cls,
        sample_id: int,
        seed: int,
        report: MixingReport,
        eps_verdicts: Dict[float, Verdict],
        nearest: Optional[float],
        wall_time_ms: Optional[float] = None,
    ) -> "CensusRow":
        return cls(
            sample_id=sample_id,
            seed=seed,
            delta1=report.delta1_exact,
            verdict=report.verdict,
            certificate_eps=report.certificate.epsilon if report.certificate is not None else None,
            nearest_certified_hat_du=nearest,
            eps_verdicts=eps_verdicts,
            wall_time_ms=wall_time_ms,
        )

    def to_csv_row(self, epsilon_list: Sequence[float]) -> list:
        return (
            [
                self.sample_id,
                self.seed,
                self.delta1,
                self.verdict.value,
                self.certificate_eps,
                self.nearest_certified_hat_du,
            ]
            + [self.eps_verdicts[e].value for e in epsilon_list]
            + [self.wall_time_ms]
        )


def census_header(epsilon_list: Sequence[float]) -> List[str]:
    return (
        ["sample_id", "seed", "delta1", "verdict", "certificate_eps", "nearest_certified_hat_du"]
        + ["eps_{}_verdict".format(e) for e in epsilon_list]
        + ["wall_time_ms"]
    )


def perturbation_sweep(
    Q: Qso,
    verdict: Verdict,
    epsilon_list: Sequence[float],
    horizon: int,
    starts: int,
    rng: np.random.Generator,
) -> Tuple[Dict[float, Verdict], Optional[float]]:
    """
    Classify ``perturb(Q, eps)`` for every radius. Returns the verdicts and the
    smallest ``hat_du`` from ``Q`` to a CertifiedYes operator among ``Q`` itself
    (distance 0) and its perturbations, or None when there is none.
    """
    eps_verdicts = {}
    nearest = 0.0 if verdict is Verdict.CERTIFIED_YES else None
    for eps in epsilon_list:
        perturbed = perturb(Q, eps)
        eps_verdict = classify_quasi_mixing(perturbed, horizon, starts, rng, profile=False).verdict
        eps_verdicts[eps] = eps_verdict
        if eps_verdict is Verdict.CERTIFIED_YES:
            dist = hat_du_exact(Q, perturbed)[0]
            nearest = dist if nearest is None else min(nearest, dist)
    return eps_verdicts, nearest


def census_row(sample_id: int, cfg: CensusConfig) -> CensusRow:
    """Classify sample ``sample_id`` of the census and its perturbations."""
    start = time.perf_counter()
    seed = substream_seed(cfg.seed, sample_id)
    rng = np.random.default_rng(seed)
    Q = sample_qso(cfg.dim, cfg.alpha, rng)
    report = classify_quasi_mixing(Q, cfg.horizon, cfg.starts, rng, profile=False)
    eps_verdicts, nearest = perturbation_sweep(
        Q, report.verdict, cfg.epsilon_list, cfg.horizon, cfg.starts, rng
    )
    return CensusRow.from_report(
        sample_id,
        seed,
        report,
        eps_verdicts,
        nearest,
        wall_time_ms=(time.perf_counter() - start) * 1000.0 if cfg.record_timing else None,
    )


def run_census(cfg: CensusConfig) -> Tuple[List[CensusRow], dict]:
    """
    Run the census, write the CSV (rows in ``sample_id`` order) and return the
    rows together with the :class:`CensusEvaluator` summary.

    Raises:
        NumericAssertionError: a perturbed sample failed to certify.
    """
    threads = worker_count(cfg.threads)
    logger.info(
        "Census: d={} N={} alpha={} horizon={} on {} worker(s)".format(
            cfg.dim, cfg.samples, cfg.alpha, cfg.horizon, threads
        )
    )
    work = partial(census_row, cfg=cfg)
    ids = list(range(cfg.samples))
    start = time.perf_counter()
    if threads > 1:
        rows = p_map(work, ids, num_cpus=threads, desc="census")
    else:
        rows = t_map(work, ids, desc="census")
    rows = sorted(rows, key=lambda r: r.sample_id)
    logger.info("Census finished in {:.2f} s".format(time.perf_counter() - start))

    write_rows_csv(cfg.out_path, census_header(cfg.epsilon_list), (r.to_csv_row(cfg.epsilon_list) for r in rows))

    evaluator = CensusEvaluator(cfg.epsilon_list)
    evaluator.reset()
    evaluator.process(rows)
    results = evaluator.evaluate()
    logger.info("Raw samples:\n" + create_small_table(results["raw"]))
    print_csv_format(results)

    if cfg.svg:
        from ..utils.plotting import plot_histogram

        plot_histogram([r.delta1 for r in rows], os.path.splitext(cfg.out_path)[0] + "_delta1.svg")

    verify_results(
        results,
        [("eps_{}".format(e), "fraction_certified_yes", 1.0, 0.0) for e in cfg.epsilon_list],
    )
    return rows, results
