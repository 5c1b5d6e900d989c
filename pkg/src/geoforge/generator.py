"""Synthetic problem generation: staged sampling through record emission.

A script is sampled in three stages: one BASIC scaffold, a few BASIC_FREE
points, then constrained steps that are either a pair of INTERSECT loci
pinning one new point or a single OTHERS construction.  Every candidate step
is probed on trial coordinates before acceptance, so emitted scripts build
with high probability.

generate() runs the full pipeline per seed: build, saturate, filter the
conclusion closure, trace each surviving conclusion, and emit records.  A
record is only yielded after its replay validates, so the output stream
never contains an unverifiable proof.
"""

from __future__ import annotations

import random
import string
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .builder import Figure, _apply_step, build_figure
from .catalog import ConstructionDef, by_category, load_catalog
from .conclusion_filter import dedupe, judge
from .errors import BuildFailed, GeoError, NumericallyInfeasible, SamplingStuck
from .numeric import Tolerances
from .parsing import ConstructionClause, Rule, Step
from .records import Record
from .tracer import build_record, replay_record, trace
from .engine import Budget, db_from_figure, saturate


@dataclass
class SampleConfig:
    stage2_free_points: Tuple[int, int] = (0, 2)
    stage3_steps: Tuple[int, int] = (2, 5)
    p_intersect_pair: float = 0.5
    seed: int = 0
    budget: Budget = field(default_factory=lambda: Budget(max_rounds=4, max_facts=600))
    records_per_figure: int = 8
    step_retries: int = 40

    def __post_init__(self):
        if not 0.0 <= self.p_intersect_pair <= 1.0:
            raise ValueError("p_intersect_pair must be a probability")
        for lo, hi in (self.stage2_free_points, self.stage3_steps):
            if lo > hi or lo < 0:
                raise ValueError("empty sampling range")


@dataclass(frozen=True)
class DatasetRecordMeta:
    goal_pred: str
    n_points: int
    n_aux: int
    proof_len: int
    millis: float


# ---------------------------------------------------------------------------
# script sampling


def _locus_key(cc: ConstructionClause) -> tuple:
    """Identity of the locus an INTERSECT clause constrains its output to."""
    name, args = cc.name, cc.args
    if name in ("on_line", "on_bline", "on_dia"):
        return (name,) + tuple(sorted(args))
    if name in ("on_pline", "on_tline"):
        return (name, args[0]) + tuple(sorted(args[1:]))
    if name == "on_cyclic":
        return (name,) + tuple(sorted(args))
    return (name,) + tuple(args)


def _draw_args(cdef: ConstructionDef, points: Sequence[str], rng: random.Random):
    if len(points) < len(cdef.args):
        return None
    return tuple(rng.sample(list(points), len(cdef.args)))


def sample_script(cfg: SampleConfig, defs: Dict[str, ConstructionDef],
                  rng: random.Random,
                  tol: Optional[Tolerances] = None) -> List[Step]:
    """Sample a feasible construction script (raises SamplingStuck)."""
    tol = tol or Tolerances()
    cats = {cat: by_category(defs, cat)
            for cat in ("BASIC", "BASIC_FREE", "INTERSECT", "OTHERS")}
    for cat, group in cats.items():
        if not group:
            raise SamplingStuck(f"catalog has no {cat} constructions")
    names = iter(string.ascii_lowercase)
    steps: List[Step] = []
    coords: Dict[str, object] = {}
    probe_rng = random.Random(rng.getrandbits(64))

    def commit(step: Step) -> bool:
        trial = dict(coords)
        try:
            _apply_step(trial, step, defs, probe_rng, tol)
        except (NumericallyInfeasible, BuildFailed):
            return False
        coords.clear()
        coords.update(trial)
        steps.append(step)
        return True

    def fresh(k: int) -> Tuple[str, ...]:
        return tuple(next(names) for _ in range(k))

    # stage 1: scaffold
    basic = rng.choice(cats["BASIC"])
    for _ in range(cfg.step_retries):
        outs = fresh(len(basic.outputs))
        if commit((ConstructionClause(outs, basic.name, ()),)):
            break
    else:
        raise SamplingStuck(f"scaffold {basic.name} never placed")

    # stage 2: free points
    n_free = rng.randint(*cfg.stage2_free_points)
    for _ in range(n_free):
        free = rng.choice(cats["BASIC_FREE"])
        for _ in range(cfg.step_retries):
            if commit((ConstructionClause(fresh(1), free.name, ()),)):
                break
        else:
            raise SamplingStuck("free point placement stalled")

    # stage 3: constrained constructions
    n_steps = rng.randint(*cfg.stage3_steps)
    for _ in range(n_steps):
        pair = rng.random() < cfg.p_intersect_pair
        for _ in range(cfg.step_retries):
            pts = sorted(coords)
            if pair:
                out = fresh(1)
                d1, d2 = rng.choice(cats["INTERSECT"]), rng.choice(cats["INTERSECT"])
                a1, a2 = _draw_args(d1, pts, rng), _draw_args(d2, pts, rng)
                if a1 is None or a2 is None:
                    continue
                c1 = ConstructionClause(out, d1.name, a1)
                c2 = ConstructionClause(out, d2.name, a2)
                if _locus_key(c1) == _locus_key(c2):
                    continue        # same locus: intersection is not a point
                if commit((c1, c2)):
                    break
            else:
                cdef = rng.choice(cats["OTHERS"])
                args = _draw_args(cdef, pts, rng)
                if args is None:
                    continue
                if commit((ConstructionClause(fresh(1), cdef.name, args),)):
                    break
        else:
            raise SamplingStuck("constrained step sampling stalled")
    return steps


# ---------------------------------------------------------------------------
# pipeline


def records_for_figure(fig: Figure, rules: Sequence[Rule],
                       defs: Dict[str, ConstructionDef],
                       budget: Budget, cap: int,
                       tol: Optional[Tolerances] = None) -> List[Record]:
    """Saturate a figure and emit up to `cap` replay-valid records."""
    tol = tol or Tolerances()
    db = db_from_figure(fig.points, fig.statements(), tol)
    saturate(db, rules, budget=budget)
    derived = [f for f in db.facts
               if f.rule not in ("premise", "numerical_check")]
    kept = [f.stmt for f in derived if judge(f.stmt, fig, db, tol).keep]
    candidates = []
    for pos, goal in enumerate(dedupe(kept, fig, tol)):
        gid = db.query(goal)
        if gid is None:
            continue
        dag = trace(db, gid)
        if not dag.premises:
            continue            # nothing assumed: not a problem, a tautology
        candidates.append((-len(dag.steps), pos, goal, gid))
    candidates.sort()           # deepest proofs first, then closure order
    out: List[Record] = []
    for _, _, goal, gid in candidates:
        if len(out) >= cap:
            break
        try:
            record = build_record(fig.clauses, goal, db, gid)
            replay_record(record, defs, rules, tol, figure=fig)
        except GeoError:
            continue
        out.append(record)
    return out


def generate(cfg: SampleConfig, rules: Sequence[Rule], n: int,
             defs: Optional[Dict[str, ConstructionDef]] = None,
             tol: Optional[Tolerances] = None,
             with_meta: bool = False) -> Iterator:
    """Stream records over `n` seeds; failed seeds are skipped silently."""
    defs = defs if defs is not None else load_catalog()
    tol = tol or Tolerances()
    for i in range(n):
        rng = random.Random(cfg.seed * 1_000_003 + i)
        t0 = time.perf_counter()
        try:
            script = sample_script(cfg, defs, rng, tol)
            fig = build_figure(script, defs, tol, rng)
            records = records_for_figure(fig, rules, defs, cfg.budget,
                                         cfg.records_per_figure, tol)
        except GeoError:
            continue
        millis = (time.perf_counter() - t0) * 1e3
        for record in records:
            if with_meta:
                meta = DatasetRecordMeta(
                    goal_pred=record.problem.goal.pred,
                    n_points=len(record.declared_points()),
                    n_aux=len(record.aux),
                    proof_len=len(record.proof),
                    millis=millis,
                )
                yield record, meta
            else:
                yield record


# ---------------------------------------------------------------------------
# dataset sharding


SHARD_SIZE = 10_000


def write_shards(pairs: Iterator[Tuple[Record, DatasetRecordMeta]],
                 out_dir, shard_size: int = SHARD_SIZE) -> List[str]:
    """Write records to `\\n\\n`-separated shard files plus a manifest.

    Manifest lines: shard path, record index within the shard, goal
    predicate, point/aux/proof-step counts and generation millis, tab
    separated.
    """
    import os

    from .records import serialize_record

    os.makedirs(out_dir, exist_ok=True)
    manifest_path = os.path.join(out_dir, "manifest.tsv")
    shard_paths: List[str] = []
    shard_idx = -1
    in_shard = 0
    shard_fh = None
    with open(manifest_path, "w", encoding="utf-8") as man:
        man.write("shard\tindex\tgoal_pred\tpoints\taux\tproof_len\tmillis\n")
        for record, meta in pairs:
            if shard_fh is None or in_shard >= shard_size:
                if shard_fh is not None:
                    shard_fh.close()
                shard_idx += 1
                in_shard = 0
                name = f"shard-{shard_idx:04d}.txt"
                shard_paths.append(os.path.join(out_dir, name))
                shard_fh = open(shard_paths[-1], "w", encoding="utf-8")
            if in_shard:
                shard_fh.write("\n")
            shard_fh.write(serialize_record(record))
            man.write(f"{os.path.basename(shard_paths[-1])}\t{in_shard}\t"
                      f"{meta.goal_pred}\t{meta.n_points}\t{meta.n_aux}\t"
                      f"{meta.proof_len}\t{meta.millis:.1f}\n")
            in_shard += 1
    if shard_fh is not None:
        shard_fh.close()
    return shard_paths


def read_shard(path) -> List[Record]:
    from .records import parse_record

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return [parse_record(block) for block in text.split("\n\n") if block.strip()]
