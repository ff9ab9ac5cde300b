import logging
import numbers
import pprint
from collections.abc import Mapping

import numpy as np

from ..core.exceptions import NumericAssertionError

__all__ = ["print_csv_format", "verify_results", "flatten_results_dict"]


def print_csv_format(results):
    """
    Log summary metrics as ``copypaste:`` lines, easy to paste into a spreadsheet.

    Args:
        results (OrderedDict[dict]): group -> {metric -> value}
            unordered dict can also be printed, but in arbitrary order
    """
    assert isinstance(results, Mapping) or not len(results), results
    logger = logging.getLogger(__name__)
    for group, res in results.items():
        if isinstance(res, Mapping):
            logger.info("copypaste: Group: {}".format(group))
            logger.info("copypaste: " + ",".join(str(k) for k in res))
            logger.info("copypaste: " + ",".join(_fmt(v) for v in res.values()))
        else:
            logger.info(f"copypaste: {group}={res}")


def _fmt(v):
    if isinstance(v, numbers.Real) and not isinstance(v, (bool, numbers.Integral)):
        return "{0:.4f}".format(v)
    return str(v)


def verify_results(results, expected):
    """
    Args:
        results (OrderedDict[dict]): group -> {metric -> value}
        expected (list): ``(group, metric, value, tolerance)`` tuples

    Returns:
        bool: True when every expected value is met.

    Raises:
        NumericAssertionError: listing the failed expectations.
    """
    if not len(expected):
        return True

    failed = []
    for group, metric, value, tolerance in expected:
        actual = results.get(group, {}).get(metric, None)
        if actual is None or not np.isfinite(actual) or abs(actual - value) > tolerance:
            failed.append((group, metric, value, actual))

    logger = logging.getLogger(__name__)
    if failed:
        logger.error("Result verification failed!")
        logger.error("Actual Results: " + pprint.pformat(results))
        raise NumericAssertionError(
            "; ".join(f"{g}/{m}: expected {v}, got {a}" for g, m, v, a in failed)
        )
    logger.info("Results verification passed.")
    return True


def flatten_results_dict(results):
    """
    Expand a hierarchical dict of scalars into a flat dict of scalars.
    If results[k1][k2][k3] = v, the returned dict will have the entry
    {"k1/k2/k3": v}.
    """
    r = {}
    for k, v in results.items():
        if isinstance(v, Mapping):
            for kk, vv in flatten_results_dict(v).items():
                r[k + "/" + kk] = vv
        else:
            r[k] = v
    return r
