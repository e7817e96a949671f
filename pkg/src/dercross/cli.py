"""dercross run --config PATH [--seed N] [--samples N] [--fixture NAME] ..."""
from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigurationError
from .harness import ENV_VAR, REPORT_FORMATS, SuiteConfig, emit_report, parse_config, \
    run_suite, with_overrides


def build_parser():
    p = argparse.ArgumentParser(prog="dercross",
                                description="Seeded property checks for derived crossed modules.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the check suites")
    run.add_argument("--config", help=f"config file (default: ${ENV_VAR}, else built-in defaults)")
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--fixture")
    run.add_argument("--suites", help="comma separated subset of suites")
    run.add_argument("--report", choices=REPORT_FORMATS)
    run.add_argument("--negative-control", action="store_true",
                     help="corrupt the action, the contraction and the derived adjoint")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--timing", action="store_true",
                     help="include elapsed seconds in machine reports")
    run.add_argument("--output", help="write the report here instead of stdout")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    path = args.config or os.environ.get(ENV_VAR)
    try:
        if path:
            with open(path, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = SuiteConfig()
        suites = None
        if args.suites:
            suites = tuple(s.strip() for s in args.suites.split(",") if s.strip())
        cfg = with_overrides(cfg, seed=args.seed, samples=args.samples, fixture=args.fixture,
                             report=args.report, suites=suites,
                             negative_control=True if args.negative_control else None)
    except (ConfigurationError, OSError) as exc:
        print(f"dercross: {exc}", file=sys.stderr)
        return 2
    results, code = run_suite(cfg, workers=max(1, args.workers))
    text = emit_report(results, cfg.report, timing=args.timing)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
