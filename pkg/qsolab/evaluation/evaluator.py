import logging
from collections import Counter, OrderedDict
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.stats import binomtest

from .mixing import Verdict

__all__ = ["Evaluator", "CensusEvaluator", "wilson_interval"]

logger = logging.getLogger(__name__)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval of a binomial proportion; ``(0, 1)`` without trials."""
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


class Evaluator:
    """
    Base class for an evaluator.

    This class will accumulate information of the processed records (by :meth:`process`),
    and produce evaluation results in the end (by :meth:`evaluate`).
    """

    def reset(self):
        """
        Preparation for a new round of evaluation.
        Should be called before starting a round of evaluation.
        """
        pass

    def process(self, rows):
        """
        Process a batch of records.

        Args:
            rows (list): records produced by one batch of work.
        """
        pass

    def evaluate(self):
        """
        Evaluate/summarize after processing all records.

        Returns:
            dict: group name -> {metric name: value}
        """
        pass


class CensusEvaluator(Evaluator):
    """
    Summaries of a classification census:

    * ``raw``: verdict counts and the CertifiedYes fraction with its Wilson interval;
    * ``eps_<ε>``: the CertifiedYes fraction among the ε-perturbed samples;
    * ``delta1``: quantiles of the exact one-step coefficient.
    """

    def __init__(self, epsilon_list: Sequence[float] = (), confidence: float = 0.95):
        self._epsilon_list = tuple(epsilon_list)
        self._confidence = confidence
        self.reset()

    def reset(self):
        self._rows = []

    def process(self, rows: Iterable):
        self._rows.extend(rows)

    def evaluate(self):
        rows = self._rows
        if not rows:
            logger.warning("CensusEvaluator received no rows")
            return OrderedDict()
        n = len(rows)
        counts = Counter(str(row.verdict) for row in rows)
        yes = counts[Verdict.CERTIFIED_YES.value]
        lo, hi = wilson_interval(yes, n, self._confidence)

        results = OrderedDict()
        results["raw"] = OrderedDict(
            samples=n,
            fraction_certified_yes=yes / n,
            wilson_lo=lo,
            wilson_hi=hi,
        )
        for verdict in Verdict:
            results["raw"][verdict.value] = counts[verdict.value]

        for eps in self._epsilon_list:
            key = "eps_{}".format(eps)
            hits = sum(1 for row in rows if str(row.eps_verdicts[eps]) == Verdict.CERTIFIED_YES.value)
            results[key] = OrderedDict(samples=n, fraction_certified_yes=hits / n)

        delta1 = np.array([row.delta1 for row in rows])
        q = np.quantile(delta1, [0.0, 0.25, 0.5, 0.75, 1.0])
        results["delta1"] = OrderedDict(
            min=float(q[0]), q25=float(q[1]), median=float(q[2]), q75=float(q[3]), max=float(q[4]),
            mean=float(delta1.mean()),
        )
        return results
