"""Command-line front end.

    seysen-precoding reduce --in basis.csv --algo seysen-greedy --out result
    seysen-precoding ber --config sweep.cfg --out ber.csv
    seysen-precoding cdf --config cdf.cfg --out cdf.csv

Exit codes: 0 ok, 2 parse/config error, 3 rank deficiency, 4 transform overflow.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config import load_config
from .errors import ConfigError, DimensionError, SingularMatrixError, TransformOverflowError
from .lattice import DEFAULT_LLL_DELTA, REDUCERS, reduce_basis
from .matrix_core import complex_to_real_matrix, format_matrix, integer_det, read_matrix
from .results import format_ber_csv, format_cdf_csv, write_text
from .simulator import condition_study, run_ber_sweep, run_condition_cdf, stream

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RANK = 3
EXIT_OVERFLOW = 4


def cmd_reduce(in_path, algo: str, out_prefix, delta: float = DEFAULT_LLL_DELTA, seed: int = 0) -> int:
    """Reduce the columns of a matrix file.

    Writes ``<prefix>_basis.csv`` and ``<prefix>_T.csv``.  Complex inputs are
    reduced through their real expansion.
    """
    try:
        M = read_matrix(in_path)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if np.iscomplexobj(M):
        M = complex_to_real_matrix(M)
    red = reduce_basis(M.astype(np.float64), algo, delta=delta, rng=stream(seed, 0))
    rep = red.report
    basis_csv = format_matrix(red.basis)
    t_csv = format_matrix(red.T)
    write_text(f"{out_prefix}_basis.csv", basis_csv)
    write_text(f"{out_prefix}_T.csv", t_csv)
    print(
        f"iterations={rep.iterations} S_initial={rep.initial_measure!r} "
        f"S_final={rep.final_measure!r} detT={integer_det(red.T)} "
        f"pair_evaluations={rep.pair_evaluations} converged={int(rep.converged)}"
    )
    return EXIT_OK


def cmd_ber(config_path, out_path, workers: int | None = None) -> int:
    cfg = load_config(config_path)
    points = run_ber_sweep(cfg, workers=workers)
    write_text(out_path, format_ber_csv(points))
    print(f"wrote {len(points)} rows to {out_path}")
    return EXIT_OK


def cmd_cdf(config_path, out_path, workers: int | None = None) -> int:
    cfg = load_config(config_path)
    study = condition_study(cfg, workers=workers)
    points = run_condition_cdf(cfg, study)
    write_text(out_path, format_cdf_csv(points))
    print(f"wrote {len(points)} rows to {out_path}")
    for key, val in study.complexity_summary().items():
        print(f"{key}={val:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seysen-precoding", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a lattice basis given as matrix CSV")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--algo", choices=REDUCERS, default="seysen-greedy")
    p.add_argument("--delta", type=float, default=DEFAULT_LLL_DELTA, help="LLL parameter")
    p.add_argument("--seed", type=int, default=0, help="seed for seysen-lazy")
    p.add_argument("--out", required=True, help="output file prefix")

    for name, text in (("ber", "BER sweep over schemes and SNR"),
                       ("cdf", "condition-number CDF experiment")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--workers", type=int, default=None,
                       help="process count (overrides the config)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "reduce":
            if not 0.25 < args.delta <= 1.0:
                raise ConfigError("--delta must lie in (0.25, 1]")
            return cmd_reduce(args.in_path, args.algo, args.out, args.delta, args.seed)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.command == "ber":
            return cmd_ber(args.config, args.out, args.workers)
        return cmd_cdf(args.config, args.out, args.workers)
    except (ConfigError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularMatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    except TransformOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
