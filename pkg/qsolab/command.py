"""
The ``qsolab`` command line.

Exit codes: 0 success, 1 invalid input (unreadable or malformed files, axiom
violations, bad partitions, mismatched dimensions), 2 usage errors and invalid
parameters, 3 a certified bound or exact identity failed numerically.
"""
import argparse
import csv
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from omegaconf import DictConfig

from .config import LazyCall, LazyConfig, instantiate
from .core.chain import transition_matrix, window
from .core.exceptions import (
    DimensionMismatch,
    InvalidOperator,
    InvalidParameter,
    InvalidPartition,
    NumericAssertionError,
    OperatorFileError,
    QsoError,
)
from .core.simplex import Density, as_generator
from .data.io import (
    load_matrix_csv,
    load_operator,
    load_partition,
    save_operator,
    write_matrix_csv,
    write_rows_csv,
)
from .engine.census import CensusConfig, CensusRow, census_header, perturbation_sweep, run_census
from .engine.defaults import default_setup
from .evaluation.metrics import du_bounds
from .evaluation.mixing import (
    CERT_TOL,
    QuasiCertificate,
    classify_quasi_mixing,
    delta1_exact,
    delta_n_profile,
)
from .operators.coarsen import coarsen
from .operators.zoo import (
    make_block_example,
    make_markov_averaging,
    make_q_diamond,
    make_q_flat,
    make_q_sharp,
    perturb,
    sample_qso,
    sample_stochastic_matrix,
)
from .utils.logger import setup_logger

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)

MAKE_KINDS = ("diamond", "flat", "sharp", "block", "averaging", "random", "perturb")


def _print_block(values: dict, out=None):
    out = out or sys.stdout
    for k, v in values.items():
        if isinstance(v, float):
            v = repr(v)
        print(f"{k}={v}", file=out)


def parse_anchor(spec: Optional[str], dim: int) -> Density:
    """``uniform`` (default), ``vertex:K`` (one-based) or a comma separated density."""
    if spec is None or spec == "uniform":
        return Density.uniform(dim)
    if spec.startswith("vertex:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise InvalidParameter(f"bad vertex anchor {spec!r}, expected vertex:K") from None
        if not 1 <= k <= dim:
            raise InvalidParameter(f"vertex index must lie in 1..{dim}, got {k}")
        return Density.vertex(dim, k - 1)
    try:
        values = [float(x) for x in spec.split(",")]
    except ValueError:
        raise InvalidParameter(
            f"bad anchor {spec!r}, expected uniform, vertex:K or a comma separated density"
        ) from None
    if len(values) != dim:
        raise InvalidParameter(f"anchor has {len(values)} entries, expected {dim}")
    return Density(values)


def cmd_validate(args) -> int:
    try:
        Q = load_operator(args.path)
    except (OperatorFileError, InvalidOperator) as e:
        print(f"invalid: {e}")
        return 1
    _print_block(
        {
            "valid": True,
            "dim": Q.dim,
            "symmetric": Q.symmetric,
            "max_renormalization": Q.max_renormalization,
        }
    )
    return 0


def cmd_classify(args) -> int:
    Q = load_operator(args.path)
    report = classify_quasi_mixing(
        Q,
        horizon=args.horizon,
        starts=args.starts,
        rng_seed=args.seed,
        grid=args.grid,
        empirical=not args.no_empirical,
        tol=args.tol,
    )
    eps_verdicts, nearest = perturbation_sweep(
        Q, report.verdict, args.eps, args.horizon, args.starts, as_generator(args.seed)
    )
    values = report.as_dict()
    values.update(("eps_{}_verdict".format(e), v.value) for e, v in eps_verdicts.items())
    _print_block(values)
    if args.csv:
        row = CensusRow.from_report(0, args.seed, report, eps_verdicts, nearest)
        write_rows_csv(args.csv, census_header(args.eps), [row.to_csv_row(args.eps)])
    return 0


def cmd_census(args) -> int:
    if args.config_file:
        cfg = LazyConfig.load(args.config_file)
        if "census" not in cfg:
            raise InvalidParameter(f"{args.config_file} defines no 'census' config")
    else:
        cfg = DictConfig({"census": LazyCall(CensusConfig)()}, flags={"allow_objects": True})

    flags = {
        "dim": args.dim,
        "samples": args.samples,
        "alpha": args.alpha,
        "horizon": args.horizon,
        "starts": args.starts,
        "seed": args.seed,
        "epsilon_list": args.eps,
        "out_path": args.out,
        "threads": args.threads,
    }
    for key, value in flags.items():
        if value is not None:
            cfg.census[key] = value
    if args.svg:
        cfg.census.svg = True
    if args.record_timing:
        cfg.census.record_timing = True
    LazyConfig.apply_overrides(cfg, args.opts or [])

    census_cfg = instantiate(cfg.census)
    default_setup(cfg, args)
    _, results = run_census(census_cfg)
    raw = results["raw"]
    _print_block(
        {
            "samples": raw["samples"],
            "fraction_certified_yes": raw["fraction_certified_yes"],
            "wilson_lo": raw["wilson_lo"],
            "wilson_hi": raw["wilson_hi"],
        }
    )
    for eps in census_cfg.epsilon_list:
        fraction = results["eps_{}".format(eps)]["fraction_certified_yes"]
        print("eps_{}_fraction_certified_yes={!r}".format(eps, fraction))
    for key, value in results["delta1"].items():
        print("delta1_{}={!r}".format(key, value))
    return 0


def cmd_make(args) -> int:
    kind = args.kind
    if kind in ("diamond", "flat", "sharp", "block", "averaging", "random") and args.dim is None:
        raise InvalidParameter(f"make {kind} requires --dim")
    if kind == "diamond":
        Q = make_q_diamond(parse_anchor(args.anchor, args.dim))
    elif kind == "flat":
        Q = make_q_flat(args.dim)
    elif kind == "sharp":
        Q = make_q_sharp(args.dim)
    elif kind == "block":
        Q = make_block_example(args.dim, args.split, args.h)
    elif kind == "averaging":
        if args.matrix:
            P = load_matrix_csv(args.matrix)
            if P.dim != args.dim:
                raise DimensionMismatch(args.dim, P.dim, what="matrix")
        else:
            P = sample_stochastic_matrix(args.dim, args.alpha, args.seed)
        Q = make_markov_averaging(P)
    elif kind == "random":
        Q = sample_qso(args.dim, args.alpha, args.seed)
    else:
        if not args.input:
            raise InvalidParameter("make perturb requires --in")
        if args.eps is None:
            raise InvalidParameter("make perturb requires --eps")
        base = load_operator(args.input)
        Q = perturb(base, args.eps, parse_anchor(args.anchor, base.dim))
    save_operator(Q, args.out)
    return 0


def cmd_metrics(args) -> int:
    Q1, Q2 = load_operator(args.path1), load_operator(args.path2)
    report = du_bounds(Q1, Q2, starts=args.starts, rng_seed=args.seed)
    values = report.as_dict()
    _print_block(values)
    if not report.symmetric:
        print("warning=d_u degenerate for nonsymmetric operators")
    if args.csv:
        write_rows_csv(args.csv, list(values), [list(values.values())])
    return 0


def decay_table(Q, horizon: int, starts: int, seed: int) -> List[list]:
    """
    Rows ``[n, delta_n_lower, bound_if_certified, submultiplicative_bound]``.

    Raises:
        NumericAssertionError: an estimate exceeds a bound or the estimates increase.
    """
    d1, _ = delta1_exact(Q)
    certificate = None
    if Q.symmetric and d1 < 2.0 - CERT_TOL:
        certificate = QuasiCertificate(horizon=1, epsilon=2.0 - d1)
    rows = []
    previous = np.inf
    for n, value in delta_n_profile(Q, horizon, starts, seed):
        bound = certificate.bound(n) if certificate is not None else None
        submult = 2.0 * (d1 / 2.0) ** n
        if value > previous + CERT_TOL:
            raise NumericAssertionError(f"estimates increase at n={n}: {value!r} > {previous!r}")
        if value > submult + CERT_TOL or (bound is not None and value > bound + CERT_TOL):
            raise NumericAssertionError(f"estimate {value!r} at n={n} exceeds its bound")
        previous = value
        rows.append([n, value, bound, submult])
    return rows


def cmd_decay(args) -> int:
    Q = load_operator(args.path)
    rows = decay_table(Q, args.horizon, args.starts, args.seed)
    header = ["n", "delta_n_lower", "bound_if_certified", "submultiplicative_bound"]
    if args.out:
        write_rows_csv(args.out, header, rows)
        if args.svg:
            from .utils.plotting import plot_decay

            plot_decay(
                [r[0] for r in rows],
                [r[1] for r in rows],
                os.path.splitext(args.out)[0] + ".svg",
                bound=[r[2] for r in rows],
            )
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
    return 0


def cmd_window(args) -> int:
    Q = load_operator(args.path)
    seed = parse_anchor(args.seed_density, Q.dim)
    if args.step:
        M = transition_matrix(Q, seed)
    else:
        M = window(Q, seed, args.m, args.n).product
    write_matrix_csv(args.out, M)
    return 0


def cmd_coarsen(args) -> int:
    Q = load_operator(args.path)
    part = load_partition(args.partition, Q.dim)
    save_operator(coarsen(Q, part), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsolab", description="Quadratic stochastic operator toolkit"
    )
    parser.add_argument("--verbose", action="store_true", help="log DEBUG messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms of an operator file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="quasi-mixing classification of an operator")
    p.add_argument("path")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--starts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--grid", action="store_true", help="grid certification for d <= 3")
    p.add_argument("--no-empirical", action="store_true", help="skip the empirical mixing tests")
    p.add_argument(
        "--eps", type=float, nargs="+", default=[], help="also classify perturbations of these radii"
    )
    p.add_argument("--csv", default=None, metavar="FILE", help="one row in the census schema")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("census", help="Monte Carlo classification census")
    p.add_argument("--config-file", default="", metavar="FILE")
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--starts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--out", default=None, metavar="FILE")
    p.add_argument("--threads", type=int)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--record-timing", action="store_true")
    p.add_argument("opts", nargs=argparse.REMAINDER, help='config overrides "census.key=value"')
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("make", help="write a named operator")
    p.add_argument("kind", choices=MAKE_KINDS)
    p.add_argument("--dim", type=int)
    p.add_argument("--anchor", default=None, help="uniform | vertex:K | comma separated density")
    p.add_argument("--split", type=int, default=2)
    p.add_argument("--h", type=float, nargs="+", default=None)
    p.add_argument("--matrix", default=None, metavar="CSV", help="column-stochastic matrix")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="input", default=None, metavar="FILE")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("metrics", help="distances between two operators")
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, metavar="FILE")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("decay", help="estimated delta_n with certified bounds")
    p.add_argument("path")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--starts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, metavar="FILE")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("window", help="write a chain window product as CSV")
    p.add_argument("path")
    p.add_argument("--seed-density", default=None, help="uniform | vertex:K | comma separated density")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--step", action="store_true", help="the one-step transition matrix at the seed")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("coarsen", help="coarsen an operator along a partition")
    p.add_argument("path")
    p.add_argument("--partition", required=True, help='JSON file or inline "1-3|4-6"')
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_coarsen)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    setup_logger(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        return args.func(args)
    except NumericAssertionError as e:
        logger.error(f"numeric assertion failed: {e}")
        return 3
    except (OperatorFileError, InvalidOperator, InvalidPartition, DimensionMismatch) as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1
    except QsoError as e:
        logger.error(str(e))
        print(f"usage error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
