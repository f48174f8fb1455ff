"""Command-line front end: batch queries, REPL, emitters, classification
and the Chain benchmark."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace as dc_replace

from .core import KB, Atom, DefaultFact, Local, classify_atom, iter_atoms
from .engine import Engine, EngineConfig, EngineError, answer_format
from .parser import ParseError, parse_kb, parse_query
from .printer import emit_xml, print_formula, print_presentation
from .runtime import ConversionError, emit_prolog, emit_tptp, query_to_runtime, to_runtime
from .transform import STAGES, TransformError, as_mode, prepare_query, run_pipeline

log = logging.getLogger("psoa")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class LoadFailure(Exception):
    pass


# ------------------------------------------------------------ KB loading

def _rename_locals(x, suffix: str):
    if isinstance(x, Local):
        return Local(x.name + suffix) if x.name != "Top" else x
    if isinstance(x, tuple):
        return tuple(_rename_locals(y, suffix) for y in x)
    if isinstance(x, KB):
        return x.replace(asserts=_rename_locals(x.asserts, suffix),
                         queries=_rename_locals(x.queries, suffix))
    if hasattr(x, "__dataclass_fields__"):
        return dc_replace(x, **{f: _rename_locals(getattr(x, f), suffix)
                                for f in x.__dataclass_fields__})
    return x


def load_kb(path: str, diagnostics=None) -> KB:
    """Parse a KB file and merge its Imports.

    Imported files are resolved relative to the importing file; their local
    constants get the suffix `@kbN` (N counting imported files in load order)
    so they stay apart from the importer's."""
    counter = [0]
    seen = {}

    def load(p, suffix):
        real = os.path.realpath(p)
        if real in seen:
            return None
        seen[real] = True
        try:
            with open(p, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise LoadFailure(f"{p}: {e.strerror}")
        kb = parse_kb(text, diagnostics=diagnostics)
        merged_asserts = []
        for iri, profile in kb.imports:
            if "://" in iri and not iri.startswith("file://"):
                raise LoadFailure(f"{p}: only local file imports are supported: <{iri}>")
            target = iri[len("file://"):] if iri.startswith("file://") else iri
            target = os.path.join(os.path.dirname(os.path.abspath(p)), target)
            counter[0] += 1
            sub = load(target, f"@kb{counter[0]}")
            if sub is not None:
                merged_asserts.extend(sub.asserts)
        if suffix:
            kb = _rename_locals(kb, suffix)
        return kb.replace(asserts=tuple(merged_asserts) + kb.asserts, imports=())

    return load(path, "")


def _engine_config(args) -> EngineConfig:
    return EngineConfig(depth_limit=args.depth, max_answers=args.max_answers,
                        objectification=as_mode(args.mode), tabling=args.tabling == "on",
                        occurs_check=args.occurs_check)


def _print_stage(kb_name):
    def show(name, kb):
        if name == kb_name:
            sys.stdout.write(f"% after {name}\n" + print_presentation(kb))
    return show


# -------------------------------------------------------------- commands

def cmd_run(args) -> int:
    kb = load_kb(args.kb)
    config = _engine_config(args)
    if args.emit_stage:
        run_pipeline(kb, config.objectification, "engine", _print_stage(args.emit_stage))
    engine = Engine(kb, config)
    prefixes = kb.prefix_map()
    if args.query is None and not kb.queries:
        return Repl(engine, kb, config, [args.kb]).loop()
    queries = [parse_query(args.query, prefixes)] if args.query is not None else list(kb.queries)
    status = EXIT_OK
    for q in queries:
        ans = engine.ask(q)
        print(answer_format(ans, prefixes=kb.prefixes))
        if ans.depth_exceeded:
            print("% depth limit reached; answers may be incomplete", file=sys.stderr)
        if not ans.success:
            status = EXIT_FAIL
    return status


def emit_text(kb: KB, target: str, mode="static") -> str:
    """Render a KB (and its queries) for one of the external targets."""
    if target == "xml":
        return emit_xml(kb)
    if target == "prolog":
        return emit_prolog(to_runtime(run_pipeline(kb, mode, "prolog")), kb.prefixes)
    if target == "tptp":
        pipelined = run_pipeline(kb, mode, "prolog")
        goals = [query_to_runtime(prepare_query(q, kb, mode))[0] for q in kb.queries]
        return emit_tptp(to_runtime(pipelined.replace(queries=())), kb.prefixes, goals)
    raise ValueError(f"unknown target {target!r}")


def cmd_emit(args) -> int:
    kb = load_kb(args.kb)
    text = emit_text(kb, args.to, as_mode(args.mode))
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_classify(args) -> int:
    kb = load_kb(args.kb)
    prefixes = kb.prefixes
    for c in kb.asserts:
        if isinstance(c, DefaultFact):
            atoms = [Atom(c.pred, c.descs)]
        else:
            atoms = list(iter_atoms(c.head))
            if c.body is not None:
                atoms += list(iter_atoms(c.body))
        for a in atoms:
            print(f"{print_formula(a, True, prefixes)}\t{classify_atom(a)}")
    for q in kb.queries:
        for a in iter_atoms(q):
            print(f"{print_formula(a, True, prefixes)}\t{classify_atom(a)}")
    return EXIT_OK


def _parse_range(text: str) -> list:
    parts = [int(p) for p in text.split(":")]
    if len(parts) == 1:
        return parts
    start, stop = parts[0], parts[1]
    step = parts[2] if len(parts) > 2 else 1
    return list(range(start, stop + 1, step))


def cmd_bench(args) -> int:
    from .bench import default_grid, run_bench, to_jsonl, to_table, to_tsv
    modes = args.modes.split(",") if args.modes else None
    grid = default_grid(args.groups.split(","), _parse_range(args.k), modes)
    results = run_bench(grid, args.reps, args.parallel)
    sys.stdout.write(to_table(results))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(to_tsv(results))
    if args.jsonl:
        with open(args.jsonl, "w", encoding="utf-8") as fh:
            fh.write(to_jsonl(results))
    return EXIT_OK


# ------------------------------------------------------------------ REPL

class Repl:
    """Line-oriented query loop with `:` meta-commands."""

    HELP = (":load <file>  :mode static|dynamic  :emit prolog|tptp|xml <file>  "
            ":stage <name>  :quit")

    def __init__(self, engine, kb, config, paths, stdin=None, stdout=None):
        self.engine, self.kb, self.config = engine, kb, config
        self.paths = list(paths)
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def say(self, text: str):
        self.stdout.write(text + "\n")

    def rebuild(self):
        self.engine = Engine(self.kb, self.config)

    def meta(self, line: str) -> bool:
        cmd, _, rest = line[1:].partition(" ")
        rest = rest.strip()
        if cmd in ("quit", "q", "exit"):
            return False
        if cmd == "load":
            kb = load_kb(rest)
            self.kb = self.kb.replace(asserts=self.kb.asserts + kb.asserts,
                                      prefixes=self.kb.prefixes + tuple(
                                          p for p in kb.prefixes if p not in self.kb.prefixes))
            self.paths.append(rest)
            self.rebuild()
            self.say(f"loaded {rest}")
        elif cmd == "mode":
            self.config = dc_replace(self.config, objectification=as_mode(rest))
            self.rebuild()
            self.say(f"objectification {self.config.objectification.value}")
        elif cmd == "emit":
            target, _, path = rest.partition(" ")
            text = emit_text(self.kb.replace(queries=()), target, self.config.objectification)
            with open(path.strip(), "w", encoding="utf-8") as fh:
                fh.write(text)
            self.say(f"wrote {path.strip()}")
        elif cmd == "stage":
            if rest not in STAGES:
                self.say(f"unknown stage {rest!r}; one of {', '.join(STAGES)}")
            else:
                run_pipeline(self.kb, self.config.objectification, "engine",
                             lambda n, k: n == rest and self.stdout.write(print_presentation(k)))
        else:
            self.say(self.HELP)
        return True

    def handle(self, line: str) -> bool:
        line = line.strip()
        if not line or line.startswith("%"):
            return True
        try:
            if line.startswith(":"):
                return self.meta(line)
            q = parse_query(line, self.kb.prefix_map())
            self.say(answer_format(self.engine.ask(q), prefixes=self.kb.prefixes))
        except ParseError as e:
            d = e.diagnostic
            self.say(f"parse error at {d.line}:{d.column}: {d.message}")
        except (EngineError, TransformError, ConversionError, LoadFailure, ValueError, OSError) as e:
            self.say(f"error: {e}")
        return True

    def loop(self) -> int:
        interactive = self.stdin.isatty() if hasattr(self.stdin, "isatty") else False
        while True:
            if interactive:
                self.stdout.write("> ")
                self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                return EXIT_OK
            if not self.handle(line):
                return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psoa", description="PSOA RuleML translator and query engine")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="answer queries (REPL when no query is given)")
    r.add_argument("kb")
    r.add_argument("-q", "--query")
    r.add_argument("--mode", default="static", choices=["static", "dynamic"])
    r.add_argument("--depth", type=int)
    r.add_argument("--max-answers", type=int)
    r.add_argument("--tabling", default="on", choices=["on", "off"])
    r.add_argument("--occurs-check", action="store_true")
    r.add_argument("--emit-stage", choices=STAGES)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("emit", help="translate to Prolog, TPTP or RuleML/XML")
    e.add_argument("kb")
    e.add_argument("--to", required=True, choices=["prolog", "tptp", "xml"])
    e.add_argument("-o", "--output")
    e.add_argument("--mode", default="static", choices=["static", "dynamic"])
    e.set_defaults(func=cmd_emit)

    b = sub.add_parser("bench", help="run the Chain benchmark")
    b.add_argument("--groups", default="dt,it,ds,is")
    b.add_argument("--k", default="0:500:50", help="start:stop:step (inclusive)")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--modes", help="comma-separated objectification modes")
    b.add_argument("--parallel", type=int, default=1)
    b.add_argument("-o", "--output", help="TSV result file")
    b.add_argument("--jsonl", help="JSON-lines result file")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("classify", help="print the metamodel category of every atom")
    c.add_argument("kb")
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as e:
        d = e.diagnostic
        print(f"parse error at {d.line}:{d.column}: {d.message}", file=sys.stderr)
    except (LoadFailure, EngineError, TransformError, ConversionError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
