"""
Config driven census run, e.g.

    python tools/run_census.py --config-file config/census/d5_alpha1.py census.samples=200
"""
import logging
import sys

from qsolab.config import LazyConfig, instantiate
from qsolab.core.exceptions import NumericAssertionError, QsoError
from qsolab.engine import default_argument_parser, default_setup, run_census

logger = logging.getLogger("qsolab")


def main(args):
    cfg = LazyConfig.load(args.config_file)
    cfg = LazyConfig.apply_overrides(cfg, args.opts)
    default_setup(cfg, args)

    _, results = run_census(instantiate(cfg.census))
    return results


def invoke_main() -> int:
    args = default_argument_parser().parse_args()
    try:
        main(args)
    except NumericAssertionError as e:
        logger.error(f"numeric assertion failed: {e}")
        return 3
    except QsoError as e:
        logger.error(str(e))
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(invoke_main())  # pragma: no cover
