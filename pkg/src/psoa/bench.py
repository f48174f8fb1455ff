"""Chain benchmark: generator, timing harness and table output."""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .core import KB, Atom, Local, Rule, Slot, Tuple, Var
from .engine import Engine, EngineConfig, EngineError
from .transform import ObjectificationMode, as_mode


class Group(str, Enum):
    DEP_TUPLE = "dt"
    INDEP_TUPLE = "it"
    DEP_SLOT = "ds"
    INDEP_SLOT = "is"

    @property
    def label(self) -> str:
        return {"dt": "DepTuple", "it": "IndepTuple", "ds": "DepSlot", "is": "IndepSlot"}[self.value]


def as_group(g) -> Group:
    if isinstance(g, Group):
        return g
    s = str(g).lower()
    for grp in Group:
        if s in (grp.value, grp.label.lower()):
            return grp
    raise ValueError(f"unknown chain group {g!r}")


@dataclass(frozen=True)
class ChainSpec:
    group: Group
    k: int
    arity: int = 3

    def __post_init__(self):
        object.__setattr__(self, "group", as_group(self.group))
        if self.k < 0:
            raise ValueError("k must be non-negative")


@dataclass
class BenchResult:
    spec: ChainSpec
    objectification: ObjectificationMode
    wall_millis: float
    verdict: str
    samples: tuple = ()

    def row(self) -> dict:
        return {"group": self.spec.group.label, "k": self.spec.k,
                "mode": self.objectification.value, "millis": round(self.wall_millis, 3),
                "verdict": self.verdict}


def _descs(group: Group, terms) -> tuple:
    if group in (Group.DEP_TUPLE, Group.INDEP_TUPLE):
        return (Tuple(tuple(terms), group is Group.DEP_TUPLE),)
    dep = group is Group.DEP_SLOT
    return tuple(Slot(Local(f"p{i}"), t, dep) for i, t in enumerate(terms, 1))


def generate_chain(spec: ChainSpec):
    """The Chain KB for `spec` and its query over the last predicate."""
    n, g = spec.arity, spec.group
    xs = tuple(Var(f"X{i}") for i in range(1, n + 1))
    clauses = [Rule(Atom(Local("r0"), _descs(g, [Local(f"a{i}") for i in range(1, n + 1)])))]
    for i in range(1, spec.k + 1):
        clauses.append(Rule(Atom(Local(f"r{i}"), _descs(g, xs)),
                            Atom(Local(f"r{i - 1}"), _descs(g, xs)), xs))
    query = Atom(Local(f"r{spec.k}"), _descs(g, xs))
    return KB(asserts=tuple(clauses)), query


def canonical_bindings(spec: ChainSpec) -> dict:
    return {Var(f"X{i}"): Local(f"a{i}") for i in range(1, spec.arity + 1)}


def run_cell(spec: ChainSpec, mode, repetitions: int = 5, config: EngineConfig = None) -> BenchResult:
    """Median query-execution time; the KB is translated and loaded once
    outside the timed region, and one warm-up query is discarded."""
    mode = as_mode(mode)
    kb, query = generate_chain(spec)
    cfg = config or EngineConfig()
    cfg = EngineConfig(cfg.depth_limit, cfg.max_answers, mode, cfg.tabling, cfg.occurs_check)
    expected = canonical_bindings(spec)
    samples = []
    try:
        engine = Engine(kb, cfg)
        for rep in range(repetitions + 1):
            t0 = time.perf_counter()
            answer = engine.ask(query)
            elapsed = (time.perf_counter() - t0) * 1000.0
            if answer.depth_exceeded and not answer.success:
                return BenchResult(spec, mode, float("nan"), "DepthExceeded", tuple(samples))
            if not (answer.success and answer.bindings == [expected]):
                raise AssertionError(f"{spec}: unexpected answer {answer.bindings}")
            if rep > 0:
                samples.append(elapsed)
    except MemoryError:
        return BenchResult(spec, mode, float("nan"), "MemoryError", tuple(samples))
    except EngineError:
        return BenchResult(spec, mode, float("nan"), "DepthExceeded", tuple(samples))
    return BenchResult(spec, mode, statistics.median(samples), "Answered", tuple(samples))


def run_bench(grid, repetitions: int = 5, parallel: int = 1, config: EngineConfig = None) -> list:
    """Time every (ChainSpec, mode) cell of the grid; results in grid order."""
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    grid = list(grid)
    if parallel <= 1:
        return [run_cell(s, m, repetitions, config) for s, m in grid]
    with ThreadPoolExecutor(parallel) as ex:
        return list(ex.map(lambda c: run_cell(c[0], c[1], repetitions, config), grid))


def default_grid(groups=("dt", "it", "ds", "is"), ks=range(0, 301, 50), modes=None) -> list:
    """Cells in table order; dynamic objectification is only distinct for
    the dependent-tuple group, the only one with relational predicates."""
    out = []
    for g in map(as_group, groups):
        ms = modes or ([ObjectificationMode.STATIC, ObjectificationMode.STATIC_DYNAMIC]
                       if g is Group.DEP_TUPLE else [ObjectificationMode.STATIC])
        for m in ms:
            for k in ks:
                out.append((ChainSpec(g, k), as_mode(m)))
    return out


def to_tsv(results) -> str:
    lines = ["group\tk\tmode\tmillis\tverdict"]
    for r in results:
        d = r.row()
        lines.append(f"{d['group']}\t{d['k']}\t{d['mode']}\t{d['millis']:.3f}\t{d['verdict']}")
    return "\n".join(lines) + "\n"


def to_jsonl(results) -> str:
    return "".join(json.dumps(r.row()) + "\n" for r in results)


def to_table(results) -> str:
    """Pivot: one row per k, one column per group/mode."""
    cols, rows = [], {}
    for r in results:
        col = f"{r.spec.group.label}/{r.objectification.value}"
        if col not in cols:
            cols.append(col)
        cell = f"{r.wall_millis:.1f}" if r.verdict == "Answered" else "query-err"
        rows.setdefault(r.spec.k, {})[col] = cell
    lines = ["k\t" + "\t".join(cols)]
    for k in sorted(rows):
        lines.append(f"{k}\t" + "\t".join(rows[k].get(c, "") for c in cols))
    return "\n".join(lines) + "\n"
