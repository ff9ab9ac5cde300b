"""
Shared setup for the command line entry points: argument parsing for config
driven runs and the logging / config-backup boilerplate of a job.
"""
import argparse
import logging
import os
import sys

from omegaconf import OmegaConf

from ..config import LazyConfig
from ..utils.env import worker_count
from ..utils.file_io import PathManager
from ..utils.logger import setup_logger

__all__ = ["default_argument_parser", "default_setup"]


def default_argument_parser(epilog=None):
    """
    Create a parser with the arguments shared by config-driven runs.

    Args:
        epilog (str): epilog passed to ArgumentParser describing the usage.

    Returns:
        argparse.ArgumentParser:
    """
    parser = argparse.ArgumentParser(
        epilog=epilog
        or f"""
Examples:

Run a census:
    $ {sys.argv[0]} --config-file config/census/d5_alpha1.py

Change some config options:
    $ {sys.argv[0]} --config-file config/census/d5_alpha1.py census.samples=200 census.seed=7
""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--config-file", default="", metavar="FILE", help="path to config file")
    parser.add_argument("--verbose", action="store_true", help="log DEBUG messages to the console")
    parser.add_argument(
        "opts",
        help="""
Modify config options at the end of the command, using "path.key=value".
        """.strip(),
        default=None,
        nargs=argparse.REMAINDER,
    )
    return parser


def _try_get_key(cfg, *keys, default=None):
    """
    Try select keys from cfg until the first key that exists. Otherwise return default.
    """
    for k in keys:
        none = object()
        p = OmegaConf.select(cfg, k, default=none)
        if p is not none:
            return p
    return default


def default_setup(cfg, args):
    """
    Perform some basic common setups at the beginning of a job:

    1. Set up the qsolab logger (console, plus ``<output_dir>/log.txt``)
    2. Log the command line arguments and the config file
    3. Back up the resolved config to ``<output_dir>/config.yaml``

    Returns:
        str: the output directory ("" when the config names none).
    """
    out_path = _try_get_key(cfg, "census.out_path", "out_path", default="")
    output_dir = os.path.dirname(out_path) if out_path else ""
    if output_dir:
        PathManager.mkdirs(output_dir)

    level = logging.DEBUG if getattr(args, "verbose", False) else logging.INFO
    logger = setup_logger(output_dir or None, level=level)

    logger.info("Command line arguments: " + str(args))
    config_file = getattr(args, "config_file", "")
    if config_file:
        with PathManager.open(config_file, "r") as f:
            logger.info("Contents of args.config_file={}:\n{}".format(config_file, f.read()))
    threads = _try_get_key(cfg, "census.threads", default=None)
    logger.info("Worker pool size: {}".format(worker_count(threads)))

    if output_dir:
        path = os.path.join(output_dir, "config.yaml")
        LazyConfig.save(cfg, path)
        logger.info("Full config saved to {}".format(path))
    return output_dir
