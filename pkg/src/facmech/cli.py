"""``facmech`` command line.

Exit codes: 0 success, 1 bad input or configuration, 2 mechanism domain
error, 3 strategyproofness violations found, 4 sweep maximum above the
proven bound.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import documents as docs
from .instances import Fixture, Generator
from .mechanisms import MECHANISM_NAMES, AlphaParam, Mechanism
from .model import DomainError, FacilityError, Objective, exact
from .suite import COLUMNS, DEFAULT_EPS, paper_suite
from .verification import fuzz_sp, sweep

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_VIOLATION, EXIT_BOUND = 0, 1, 2, 3, 4

DEFAULT_GENERATOR = {
    "median2": "uniform-homogeneous",
    "alpha-stat": "uniform-homogeneous",
    "broken-mean": "uniform-homogeneous",
    "pmm": "uniform-general",
    "naive-median-f1": "uniform-general",
    "naive-left-right": "uniform-general",
    "leftmost-priority": "uniform-overlap",
    "vote-for-priority": "singleton",
    "general-max": "singleton",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for domain errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _mechanism(args) -> Mechanism:
    alpha = AlphaParam.parse(args.alpha) if args.alpha else None
    if alpha is not None and args.mechanism != "alpha-stat":
        raise UsageError("--alpha only applies to alpha-stat")
    return Mechanism(args.mechanism, alpha)


def _instance(args):
    if args.instance:
        return docs.load_instance(args.instance), str(args.instance)
    fx = Fixture.parse(args.fixture)
    return fx.build(), fx.ident()


def _generator(args) -> Generator:
    return Generator.parse(args.generator or DEFAULT_GENERATOR[args.mechanism])


def _emit(report: dict) -> None:
    sys.stdout.write(docs.dumps_report(report))


def cmd_run(args) -> int:
    mech = _mechanism(args)
    inst, source = _instance(args)
    _emit(docs.run_report(mech, inst, source, Objective.parse(args.objective)))
    return EXIT_OK


def cmd_opt(args) -> int:
    inst, source = _instance(args)
    _emit(docs.opt_report(inst, Objective.parse(args.objective), source))
    return EXIT_OK


def cmd_fuzz_sp(args) -> int:
    mech = _mechanism(args)
    gen = _generator(args)
    rep = fuzz_sp(mech, gen, args.trials, args.seed)
    if args.out:
        docs.write_csv(args.out, docs.FUZZ_COLUMNS, docs.fuzz_rows(rep))
    _emit({"mechanism": rep.mechanism, "generator": rep.generator, "trials": rep.trials,
           "seed": rep.seed, "violations": len(rep.violations),
           "instances_with_violations": len({t for t, _ in rep.violations}), "ok": rep.ok})
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    mech = _mechanism(args)
    gen = _generator(args)
    rep = sweep(mech, Objective.parse(args.objective), gen, args.trials, args.seed)
    if args.out:
        docs.write_csv(args.out, docs.SWEEP_COLUMNS, docs.sweep_rows(rep))
    _emit(docs.sweep_report_dict(rep))
    return EXIT_BOUND if rep.within_bound is False else EXIT_OK


def _eps_list(text: Optional[str]) -> list[Fraction]:
    if not text:
        return list(DEFAULT_EPS)
    out = []
    for part in text.split(","):
        eps = Fraction(exact(part.strip()))
        if not 0 < eps < Fraction(1, 8):
            raise UsageError(f"eps {part.strip()!r} outside (0, 1/8)")
        out.append(eps)
    return out


def cmd_paper_suite(args) -> int:
    rows = paper_suite(_eps_list(args.eps_list))
    path = Path(args.out) / "paper_suite.csv"
    docs.write_csv(path, COLUMNS, [r.cells() for r in rows])
    _emit({"table": str(path), "rows": len(rows),
           "above_bound": [[r.fixture, r.mechanism] for r in rows
                           if r.bound_kind == "upper" and r.order > 0]})
    return EXIT_OK


def _seed(text: str) -> int:
    value = int(text)
    if not -(2 ** 63) <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _trials(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("trials must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="facmech", description="Two-facility mechanisms with candidate locations on a line.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def mech_args(sp):
        sp.add_argument("--mechanism", required=True, choices=MECHANISM_NAMES)
        sp.add_argument("--alpha", help="p/q or sqrt2-1 (alpha-stat only)")

    def source_args(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--instance", metavar="FILE", help="instance JSON document")
        g.add_argument("--fixture", metavar="ID", help="e.g. median-tight?eps=1/1000")

    sp = sub.add_parser("run", help="run a mechanism on one instance")
    mech_args(sp)
    source_args(sp)
    sp.add_argument("--objective", required=True, choices=("sc", "mc"))
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("opt", help="brute-force optimum of one instance")
    source_args(sp)
    sp.add_argument("--objective", required=True, choices=("sc", "mc"))
    sp.set_defaults(func=cmd_opt)

    sp = sub.add_parser("fuzz-sp", help="search random instances for profitable misreports")
    mech_args(sp)
    sp.add_argument("--generator", help="gen:NAME[?params]; default depends on the mechanism")
    sp.add_argument("--trials", required=True, type=_trials)
    sp.add_argument("--seed", required=True, type=_seed)
    sp.add_argument("--out", metavar="CSV")
    sp.set_defaults(func=cmd_fuzz_sp)

    sp = sub.add_parser("sweep", help="worst observed ratio over random instances")
    mech_args(sp)
    sp.add_argument("--objective", required=True, choices=("sc", "mc"))
    sp.add_argument("--generator")
    sp.add_argument("--trials", required=True, type=_trials)
    sp.add_argument("--seed", required=True, type=_seed)
    sp.add_argument("--out", metavar="CSV")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("paper-suite", help="ratio table for every fixture")
    sp.add_argument("--eps-list", help="comma-separated rationals in (0, 1/8)")
    sp.add_argument("--out", required=True, metavar="DIR")
    sp.set_defaults(func=cmd_paper_suite)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"facmech: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (FacilityError, UsageError, ValueError, TypeError) as exc:
        print(f"facmech: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
