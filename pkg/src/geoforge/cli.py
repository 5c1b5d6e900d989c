"""Command-line entry points.

Commands
  solve         prove one problem, optionally proposing aux constructions
  generate      sample synthetic problems with proofs into shard files
  check         replay-validate a record file
  bench-match   naive vs partial matcher timing over a problem suite
  bench-kernels compiled extension vs pure-python kernel timing
  figure-dump   build a problem figure and print its coordinates

Every command prints a machine-parseable outcome line.  Exit status: 0 on
success (for solve: proof found), 1 for a clean negative (unsolved, failed
check), 2 for errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from importlib import resources
from pathlib import Path

from . import __version__
from .bench import bench_kernels, run_bench
from .builder import build_problem_figure
from .catalog import load_catalog
from .errors import ClosureMismatch, GeoError, ReplayFailed
from .generator import SampleConfig, generate, write_shards
from .numeric import Tolerances
from .parsing import load_problem, load_rules
from .prover import (EnumerativeProposer, ExternalProposer, SearchBudget,
                     solve)
from .records import parse_record, serialize_record
from .tracer import replay_record
from .engine import Budget
import random


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--defs", metavar="FILE", help="construction catalog file")
    sub.add_argument("--rules", metavar="FILE", help="rule file")
    sub.add_argument("--tol", type=float, metavar="EPS",
                     help="numeric equality tolerance (eps_eq)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)


def _setup(args):
    defs = load_catalog(args.defs)
    rules = load_rules(args.rules)
    tol = Tolerances(eps_eq=args.tol) if args.tol else Tolerances()
    return defs, rules, tol


def _bundled_dir(sub: str) -> Path:
    return Path(str(resources.files("geoforge").joinpath(f"data/{sub}")))


def cmd_solve(args) -> int:
    defs, rules, tol = _setup(args)
    problem = load_problem(args.problem)
    proposer = None
    fallback = None
    if args.proposer == "enum":
        proposer = EnumerativeProposer(defs, tol=tol)
    elif args.proposer.startswith("exec:"):
        proposer = ExternalProposer(args.proposer[5:], timeout=args.timeout or 10.0)
        fallback = EnumerativeProposer(defs, tol=tol)
    elif args.proposer != "none":
        raise GeoError(f"unknown proposer {args.proposer!r}")
    budget = SearchBudget(
        beam_width=args.beam, max_depth=args.depth,
        wall_millis=args.timeout * 1e3 if args.timeout else None)
    t0 = time.perf_counter()
    record = solve(problem, rules, proposer=proposer, budget=budget,
                   defs=defs, tol=tol, fallback=fallback)
    millis = (time.perf_counter() - t0) * 1e3
    if record is None:
        print(f"unsolved millis={millis:.0f} aux=0")
        return 1
    out = args.out or args.problem + ".proof"
    Path(out).write_text(serialize_record(record), encoding="utf-8")
    print(f"solved millis={millis:.0f} aux={len(record.aux)} record={out}")
    return 0


def cmd_generate(args) -> int:
    defs, rules, tol = _setup(args)
    cfg = SampleConfig(seed=args.seed, records_per_figure=args.per_figure)
    t0 = time.perf_counter()
    pairs = generate(cfg, rules, args.n, defs=defs, tol=tol, with_meta=True)
    shards = write_shards(pairs, args.out)
    total = sum(1 for p in Path(args.out).glob("shard-*.txt")
                for b in p.read_text("utf-8").split("\n\n") if b.strip())
    millis = (time.perf_counter() - t0) * 1e3
    print(f"generated records={total} shards={len(shards)} seeds={args.n} "
          f"out={args.out} millis={millis:.0f}")
    return 0


def cmd_check(args) -> int:
    defs, rules, tol = _setup(args)
    with open(args.record, "r", encoding="utf-8") as fh:
        record = parse_record(fh.read())
    try:
        replay_record(record, defs, rules, tol)
    except ReplayFailed as e:
        print(f"FAIL step={e.step} {e}")
        return 1
    print("OK")
    return 0


def cmd_bench_match(args) -> int:
    defs, rules, tol = _setup(args)
    suite = Path(args.suite) if args.suite else _bundled_dir("bench")
    files = sorted(suite.glob("*.gex"))
    if not files:
        raise GeoError(f"no .gex problems under {suite}")
    problems = [(f.stem, load_problem(str(f))) for f in files]
    budget = Budget(max_rounds=args.rounds, max_facts=args.max_facts)
    report = run_bench(problems, rules, defs, budget, tol,
                       seed=args.seed, threads=args.threads)
    print(report.table())
    if args.tsv:
        Path(args.tsv).write_text(report.tsv(), encoding="utf-8")
    return 0


def cmd_bench_kernels(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    print(bench_kernels(sizes, repeats=args.repeats, seed=args.seed))
    return 0


def cmd_figure_dump(args) -> int:
    defs, _, tol = _setup(args)
    problem = load_problem(args.problem)
    fig = build_problem_figure(problem, defs, tol=tol,
                               rng=random.Random(args.seed))
    for name in sorted(fig.points):
        p = fig.points[name]
        print(f"{name}\t{p.x:.9f}\t{p.y:.9f}")
    return 0


def main(argv=None) -> int:
    top = argparse.ArgumentParser(prog="geoforge", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--version", action="version", version=__version__)
    subs = top.add_subparsers(dest="command", required=True)

    p = subs.add_parser("solve", help="prove one problem")
    p.add_argument("--problem", required=True, metavar="FILE")
    p.add_argument("--proposer", default="enum",
                   help="none | enum | exec:CMD (default enum)")
    p.add_argument("--beam", type=int, default=4)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--timeout", type=float, metavar="S",
                   help="wall-clock cap in seconds")
    p.add_argument("--out", metavar="FILE", help="record output path")
    _common(p)
    p.set_defaults(fn=cmd_solve)

    p = subs.add_parser("generate", help="sample synthetic records")
    p.add_argument("--n", type=int, required=True, metavar="SEEDS")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--per-figure", type=int, default=8,
                   help="record cap per sampled figure")
    _common(p)
    p.set_defaults(fn=cmd_generate)

    p = subs.add_parser("check", help="replay-validate a record file")
    p.add_argument("record", metavar="FILE")
    _common(p)
    p.set_defaults(fn=cmd_check)

    p = subs.add_parser("bench-match", help="naive vs partial matcher bench")
    p.add_argument("--suite", metavar="DIR",
                   help="directory of .gex problems (default: bundled suite)")
    p.add_argument("--rounds", type=int, default=1,
                   help="saturation rounds per run")
    p.add_argument("--max-facts", type=int, default=100_000)
    p.add_argument("--tsv", metavar="FILE", help="also write a TSV report")
    _common(p)
    p.set_defaults(fn=cmd_bench_match)

    p = subs.add_parser("bench-kernels", help="kernel backend comparison")
    p.add_argument("--sizes", default="64,128,256",
                   help="comma-separated point counts")
    p.add_argument("--repeats", type=int, default=5)
    _common(p)
    p.set_defaults(fn=cmd_bench_kernels)

    p = subs.add_parser("figure-dump", help="print figure coordinates")
    p.add_argument("--problem", required=True, metavar="FILE")
    _common(p)
    p.set_defaults(fn=cmd_figure_dump)

    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except ClosureMismatch as e:
        print(f"error: ClosureMismatch: {e}", file=sys.stderr)
        return 2
    except (GeoError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
