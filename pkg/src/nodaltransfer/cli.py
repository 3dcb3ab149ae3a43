"""Command-line entry point."""
import argparse
import logging
import sys

from .config import ConfigError, load_config, parse_branch_range
from .model import DAY
from .pipeline import EXIT_ERROR, MODES, run_pipeline, summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nodaltransfer",
                                 description="Minimum-fuel low-thrust transfer between circular orbits "
                                             "with J2 nodal precession.")
    ap.add_argument("--config", required=True, help="mission INI file")
    ap.add_argument("--mode", choices=MODES, default="ocp")
    ap.add_argument("--out", default=None, help="output directory for reports")
    grp = ap.add_mutually_exclusive_group()
    grp.add_argument("--branch", type=int, default=None, help="RAAN revolution branch n")
    grp.add_argument("--scan-branches", default=None, metavar="A..B",
                     help="solve branches A..B and keep the cheapest")
    ap.add_argument("--step", type=float, default=None, metavar="DAYS", help="RK4 step during burns")
    ap.add_argument("--tol", type=float, default=None, help="scaled shooting residual tolerance")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        scan = parse_branch_range(args.scan_branches) if args.scan_branches else None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    result = run_pipeline(cfg, args.mode, args.out, branch=args.branch, scan=scan,
                          step=None if args.step is None else args.step * DAY, tol=args.tol)
    print(summary(result))
    return result.status


if __name__ == "__main__":
    sys.exit(main())
