"""Matcher and kernel benchmarks.

The matcher bench saturates every problem twice with the same budget, once
with the naive global matcher and once with partial matching plus numeric
pre-identification, asserts that both reach the same canonical fact set, and
reports per-problem timings with a geometric-mean speedup.  A closure mismatch
is a correctness bug and fails the whole run; no speedup is reported for it.

The kernel bench compares the compiled extension against the pure-numpy
fallback on the table/mask primitives, on synthetic point sets.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .builder import build_problem_figure
from .catalog import ConstructionDef, load_catalog
from .errors import ClosureMismatch
from .numeric import Point, Tolerances
from .parsing import Problem, Rule
from .statements import canonicalize
from .engine import Budget, db_from_figure, saturate
from .engine.kernels import backends


class BenchRow(NamedTuple):
    name: str
    points: int
    naive_ms: float
    partial_ms: float
    equal: bool
    speedup: Optional[float]  # None unless equal


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    @property
    def geomean(self) -> Optional[float]:
        logs = [math.log(r.speedup) for r in self.rows if r.speedup]
        if not logs:
            return None
        return math.exp(sum(logs) / len(logs))

    def table(self) -> str:
        head = f"{'problem':<24}{'pts':>4}{'naive ms':>12}{'partial ms':>12}{'speedup':>9}  equal"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            spd = f"{r.speedup:8.2f}x" if r.speedup else f"{'-':>9}"
            lines.append(f"{r.name:<24}{r.points:>4}{r.naive_ms:>12.1f}"
                         f"{r.partial_ms:>12.1f}{spd}  {str(r.equal).lower()}")
        g = self.geomean
        lines.append(f"geometric-mean speedup: {g:.2f}x" if g else
                     "geometric-mean speedup: n/a")
        return "\n".join(lines)

    def tsv(self) -> str:
        lines = ["name\tpoints\tnaive_ms\tpartial_ms\tspeedup\tequal"]
        for r in self.rows:
            spd = f"{r.speedup:.4f}" if r.speedup else ""
            lines.append(f"{r.name}\t{r.points}\t{r.naive_ms:.3f}"
                         f"\t{r.partial_ms:.3f}\t{spd}\t{int(r.equal)}")
        return "\n".join(lines) + "\n"


def _closure(db) -> frozenset:
    return frozenset(canonicalize(f.stmt) for f in db.facts)


def bench_problem(name: str, problem: Problem, rules: Sequence[Rule],
                  defs: Dict[str, ConstructionDef],
                  budget: Budget, tol: Optional[Tolerances] = None,
                  seed: int = 0) -> BenchRow:
    """Time naive vs partial saturation of one problem; same figure, budget."""
    fig = build_problem_figure(problem, defs, tol=tol, rng=random.Random(seed))
    stmts = fig.statements()

    def run(mode: str):
        db = db_from_figure(fig.points, stmts, tol)
        t0 = time.perf_counter()
        saturate(db, rules, mode=mode, budget=budget)
        return (time.perf_counter() - t0) * 1e3, _closure(db)

    naive_ms, naive_set = run("naive")
    partial_ms, partial_set = run("partial")
    equal = naive_set == partial_set
    speedup = naive_ms / partial_ms if equal and partial_ms > 0 else None
    return BenchRow(name, len(fig.points), naive_ms, partial_ms, equal, speedup)


def run_bench(problems: Sequence[Tuple[str, Problem]], rules: Sequence[Rule],
              defs: Optional[Dict[str, ConstructionDef]] = None,
              budget: Optional[Budget] = None,
              tol: Optional[Tolerances] = None, seed: int = 0,
              threads: int = 1) -> BenchReport:
    """Bench every problem; raises ClosureMismatch if any closure differs.

    Sequential by default for stable timing; with threads > 1 problems run
    concurrently and timings are per problem, not aggregate wall time.
    """
    defs = defs if defs is not None else load_catalog()
    budget = budget or Budget(max_rounds=1, max_facts=100_000)

    def job(item):
        name, problem = item
        return bench_problem(name, problem, rules, defs, budget, tol, seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, problems))
    else:
        rows = [job(item) for item in problems]
    report = BenchReport(rows)
    bad = [r.name for r in rows if not r.equal]
    if bad:
        err = ClosureMismatch(f"fact sets diverge on: {', '.join(bad)}")
        err.report = report
        raise err
    return report


# ---------------------------------------------------------------------------
# kernel backends


def bench_kernels(sizes: Sequence[int] = (64, 128, 256), repeats: int = 5,
                  seed: int = 0) -> str:
    """Aligned table comparing kernel backends on synthetic point sets."""
    mods = backends()
    names = sorted(mods)
    head = f"{'kernel':<14}{'n':>6}" + "".join(f"{n + ' ms':>14}" for n in names)
    if len(names) == 2:
        head += f"{'ratio':>9}"
    lines = [head, "-" * len(head)]
    rng = np.random.default_rng(seed)
    for n in sizes:
        xs = rng.uniform(-1, 1, n)
        ys = rng.uniform(-1, 1, n)
        inst = rng.integers(0, n, (50_000, 8)).astype(np.int32)
        mask = (inst[:, 0] != inst[:, 1]) & (inst[:, 2] != inst[:, 3]) \
            & (inst[:, 4] != inst[:, 5]) & (inst[:, 6] != inst[:, 7])
        inst = inst[mask]
        ref = mods[names[0]]
        ang = ref.angle_table(xs, ys)
        dist = ref.dist_table(xs, ys)
        cases = [
            ("angle_table", lambda m: m.angle_table(xs, ys)),
            ("dist_table", lambda m: m.dist_table(xs, ys)),
            ("eqangle_mask", lambda m: m.eqangle_mask(ang, inst, 1e-7)),
            ("eqratio_mask", lambda m: m.eqratio_mask(dist, inst, 1e-6)),
        ]
        for kname, fn in cases:
            times = []
            for bname in names:
                mod = mods[bname]
                best = math.inf
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    fn(mod)
                    best = min(best, time.perf_counter() - t0)
                times.append(best * 1e3)
            row = f"{kname:<14}{n:>6}" + "".join(f"{t:>14.3f}" for t in times)
            if len(times) == 2 and times[1] > 0:
                row += f"{times[0] / times[1]:>8.2f}x"
            lines.append(row)
    return "\n".join(lines)
