"""Command-line front end: ``control2 --N 1,3 --r-max 4 --out report.json``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .subgroups import DEFAULT_COSET_BOUND
from .verifier import CHECK_IDS, Config, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    p = _Parser(prog="control2", description=(
        "Check the 2-adic control theorem for Gamma_1(N 2^r) at concrete levels."))
    p.add_argument("--N", type=_int_list, default=(1, 3, 5),
                   help="comma list of odd tame levels (default 1,3,5)")
    p.add_argument("--r-min", type=int, default=2)
    p.add_argument("--r-max", type=int, default=4)
    p.add_argument("--s-min", type=int, default=2)
    p.add_argument("--precision", type=int, default=16, help="work mod 2^k, k in [4, 64]")
    p.add_argument("--checks", default="all",
                   help="comma list of check ids or 'all': " + ", ".join(CHECK_IDS))
    p.add_argument("--out", default=None, help="path of the JSON report ('-' for stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--coset-bound", type=int, default=DEFAULT_COSET_BOUND)
    return p


def parse_args(argv=None):
    """Validated :class:`Config`; exits with status 2 naming the bad flag."""
    p = build_parser()
    a = p.parse_args(argv)
    if not a.N:
        p.error("--N: need at least one level")
    for n in a.N:
        if n < 1 or n % 2 == 0:
            p.error(f"--N: {n} is not an odd positive integer; need (p, N) = 1 with p = 2")
    if a.r_min < 2:
        p.error(f"--r-min: levels start at r = 2, got {a.r_min}")
    if a.r_max < 2:
        p.error(f"--r-max: levels start at r = 2, got {a.r_max}")
    if a.r_max < a.r_min:
        p.error(f"--r-max: {a.r_max} is below --r-min {a.r_min}")
    if a.s_min < 2:
        p.error(f"--s-min: must be >= 2, got {a.s_min}")
    if not 4 <= a.precision <= 64:
        p.error(f"--precision: k must lie in [4, 64], got {a.precision}")
    if a.jobs < 1:
        p.error(f"--jobs: must be positive, got {a.jobs}")
    if a.coset_bound < 1:
        p.error(f"--coset-bound: must be positive, got {a.coset_bound}")
    checks = tuple(c.strip() for c in a.checks.split(",") if c.strip())
    if "all" in checks:
        checks = CHECK_IDS
    unknown = [c for c in checks if c not in CHECK_IDS]
    if unknown:
        p.error(f"--checks: unknown id(s) {', '.join(unknown)}")
    return Config(Ns=a.N, r_min=a.r_min, r_max=a.r_max, s_min=a.s_min,
                  k=a.precision, checks=checks, out=a.out, jobs=a.jobs,
                  coset_bound=a.coset_bound)


def _setup_logging():
    level = os.environ.get("CONTROL2_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def format_line(c):
    p = c.params
    level = " ".join(f"{key}={p[key]}" for key in ("N", "r", "s", "k") if p.get(key) is not None)
    line = f"{c.status.upper():7} {c.id:17} {level}"
    if c.status != "pass":
        detail = c.witness.get("counterexample") or c.witness.get("reason")
        if isinstance(detail, list):
            detail = detail[0]
        line += f"  {detail}"
    return line


def main(config):
    """Run the checks, write the report, return the exit status."""
    handle = None
    if config.out and config.out != "-":
        try:
            handle = open(config.out, "w")
        except OSError as exc:
            print(f"control2: cannot write report to {config.out}: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
    try:
        report = run(config)
        for c in report.checks:
            print(format_line(c))
        s = report.summary
        print(f"passed {s['passed']}, failed {s['failed']}, skipped {s['skipped']}, "
              f"warnings {s['warnings']}")
        text = report.dumps() + "\n"
        if handle is not None:
            handle.write(text)
        elif config.out == "-":
            sys.stdout.write(text)
    finally:
        if handle is not None:
            handle.close()
    if s["failed"]:
        return EXIT_FAIL
    if s["warnings"]:
        return EXIT_RESOURCE
    return EXIT_OK


def run_cli(argv=None):
    _setup_logging()
    return main(parse_args(argv))


if __name__ == "__main__":
    sys.exit(run_cli())
