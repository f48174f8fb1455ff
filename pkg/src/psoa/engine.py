"""Top-down SLD resolution over runtime clauses, with optional variant
tabling, constant-argument clause indexing and a RIF built-in registry."""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from decimal import DivisionByZero, InvalidOperation
from typing import Optional

from .core import (KB, Expr, ExternalTerm, Iri, Local, Number, Var, free_vars,
                   term_vars)
from .runtime import (AUX, BUILTIN, EQUAL, FUNC_NS, PRED_NS, REL, RESERVED,
                      RuntimeAtom, RuntimeClause, query_to_runtime, to_runtime)
from .transform import (ObjectificationMode, as_mode,
                        dynamic_objectify_query_atom, prepare_query,
                        relational_arities, rewrite_subpredicates,
                        run_pipeline, unnest, expand_defaults)

__all__ = ["EngineConfig", "Answer", "Engine", "solve", "evaluate_builtin",
           "answer_format", "dynamic_objectify_query_atom", "EngineError"]


class EngineError(Exception):
    pass


class InstantiationError(EngineError):
    pass


class BuiltinTypeError(EngineError):
    pass


class UnknownBuiltinError(EngineError):
    pass


class LoadError(EngineError):
    pass


class DerivationTooDeep(EngineError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    depth_limit: Optional[int] = None
    max_answers: Optional[int] = None
    objectification: ObjectificationMode = ObjectificationMode.STATIC
    tabling: bool = True
    occurs_check: bool = False

    def __post_init__(self):
        if self.depth_limit is not None and self.depth_limit < 1:
            raise ValueError("depth_limit must be at least 1")
        if self.max_answers is not None and self.max_answers < 1:
            raise ValueError("max_answers must be at least 1")
        object.__setattr__(self, "objectification", as_mode(self.objectification))


@dataclass
class Answer:
    success: bool
    bindings: list = field(default_factory=list)
    variables: tuple = ()
    depth_exceeded: bool = False

    @property
    def verdict(self) -> str:
        return "Success" if self.success else "Fail"


# ------------------------------------------------------------------ built-ins

def _num(t, iri):
    if isinstance(t, Number):
        return t.value
    raise BuiltinTypeError(f"{iri} expects numeric arguments, got {t!r}")


def _cmp(op):
    def f(iri, args):
        if len(args) != 2:
            raise BuiltinTypeError(f"{iri} expects two arguments")
        return op(_num(args[0], iri), _num(args[1], iri))
    return f


def _arith(op):
    def f(iri, args):
        if len(args) != 2:
            raise BuiltinTypeError(f"{iri} expects two arguments")
        try:
            return Number(op(_num(args[0], iri), _num(args[1], iri)))
        except (DivisionByZero, InvalidOperation, ZeroDivisionError) as e:
            raise BuiltinTypeError(f"{iri}: {e.__class__.__name__}")
    return f


BUILTINS = {
    PRED_NS + "numeric-greater-than": _cmp(lambda a, b: a > b),
    PRED_NS + "numeric-less-than": _cmp(lambda a, b: a < b),
    PRED_NS + "numeric-greater-than-or-equal": _cmp(lambda a, b: a >= b),
    PRED_NS + "numeric-less-than-or-equal": _cmp(lambda a, b: a <= b),
    PRED_NS + "numeric-equal": _cmp(lambda a, b: a == b),
    PRED_NS + "numeric-not-equal": _cmp(lambda a, b: a != b),
    FUNC_NS + "numeric-add": _arith(lambda a, b: a + b),
    FUNC_NS + "numeric-subtract": _arith(lambda a, b: a - b),
    FUNC_NS + "numeric-multiply": _arith(lambda a, b: a * b),
    FUNC_NS + "numeric-divide": _arith(lambda a, b: a / b),
    FUNC_NS + "numeric-integer-divide": _arith(lambda a, b: a // b),
    FUNC_NS + "numeric-mod": _arith(lambda a, b: a % b),
}


def evaluate_builtin(iri, args):
    """Apply a built-in to ground arguments: a bool for predicates, a Number
    for functions."""
    key = iri.iri if isinstance(iri, Iri) else str(iri)
    fn = BUILTINS.get(key)
    if fn is None:
        raise UnknownBuiltinError(f"unknown built-in {key}")
    return fn(key, list(args))


# -------------------------------------------------------------- term store
#
# Runtime terms: constants are interned Sym objects (identity equality),
# compounds are Cmp objects, variables are Ref cells. ExternalTerm arguments
# become Cmp(EXT, (function_sym, arg...)). Compiled clause templates use
# plain tuples (functor_sym, arg...) and _Tmpl variable slots.

class Sym:
    __slots__ = ("ast",)

    def __init__(self, ast):
        self.ast = ast

    def __repr__(self):
        return f"Sym({self.ast!r})"


class Ref:
    __slots__ = ("val", "name")

    def __init__(self, name=None):
        self.val = None
        self.name = name

    def __repr__(self):
        return f"Ref({self.name})"


EXT = Sym("External")


class Cmp:
    """Compound term with a cached hash; `ground` compounds are immutable
    and compared structurally, so tables can share them without copying."""
    __slots__ = ("f", "args", "ground", "h")

    def __init__(self, f, args):
        self.f = f
        self.args = args
        g = True
        for a in args:
            ta = type(a)
            if ta is not Sym and not (ta is Cmp and a.ground):
                g = False
                break
        self.ground = g
        self.h = hash((f, args))

    def __hash__(self):
        return self.h

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Cmp and self.h == other.h and self.f is other.f
                and self.args == other.args)

    def __repr__(self):
        return f"Cmp({self.f!r}, {self.args!r})"


class _Slot:
    """Numbered variable position inside a frozen answer or call pattern."""
    __slots__ = ("i",)

    def __init__(self, i):
        self.i = i

    def __eq__(self, other):
        return type(other) is _Slot and other.i == self.i

    def __hash__(self):
        return hash(("slot", self.i))


def deref(t):
    while type(t) is Ref:
        if t.val is None:
            return t
        t = t.val
    return t


class _Symbols:
    def __init__(self):
        self.table = {}

    def __call__(self, ast) -> Sym:
        s = self.table.get(ast)
        if s is None:
            s = self.table[ast] = Sym(ast)
        return s


class _Tmpl:
    """Variable slot inside a compiled clause template."""
    __slots__ = ("i",)

    def __init__(self, i):
        self.i = i


def _compile_term(t, syms, vmap):
    if isinstance(t, Var):
        if t not in vmap:
            vmap[t] = _Tmpl(len(vmap))
        return vmap[t]
    if isinstance(t, Expr):
        return (_compile_fn(t.fn, syms),) + tuple(_compile_term(a, syms, vmap) for a in t.args)
    if isinstance(t, ExternalTerm):
        e = t.expr
        if not isinstance(e, Expr):
            raise EngineError(f"External expression must be a function application: {e!r}")
        return (EXT, _compile_fn(e.fn, syms)) + tuple(_compile_term(a, syms, vmap) for a in e.args)
    return syms(t)


def _compile_fn(t, syms):
    if isinstance(t, (Local, Iri)):
        return syms(t)
    raise EngineError(f"function symbol must be a constant: {t!r}")


def _pred_key(a: RuntimeAtom, syms):
    if a.kind in RESERVED:
        return (a.kind, len(a.args))
    if a.kind == REL:
        return (REL, syms(a.name), len(a.args))
    if a.kind == AUX:
        return (AUX, a.name, len(a.args))
    return (a.kind, a.name)


class _Clause:
    __slots__ = ("index", "head", "body", "nvars", "consts")

    def __init__(self, index, head, body, nvars):
        self.index = index
        self.head = head
        self.body = body
        self.nvars = nvars
        self.consts = tuple(x if type(x) is Sym else None for x in head)


class _Pred:
    """Clauses of one predicate, indexed on constant head arguments."""

    def __init__(self):
        self.clauses = []
        self.by_pos = {}
        self.wild = {}
        self.merged = {}

    def add(self, c: _Clause):
        self.clauses.append(c)
        for pos, k in enumerate(c.consts):
            if k is None:
                self.wild.setdefault(pos, []).append(c)
            else:
                self.by_pos.setdefault(pos, {}).setdefault(k, []).append(c)

    def _at(self, pos, a):
        exact = self.by_pos.get(pos, {}).get(a, ())
        wild = self.wild.get(pos)
        if not wild:
            return exact
        key = (pos, a)
        lst = self.merged.get(key)
        if lst is None:
            lst = sorted(list(exact) + wild, key=lambda c: c.index)
            self.merged[key] = lst
        return lst

    def candidates(self, args):
        best = None
        for pos, a in enumerate(args):
            if type(a) is Ref:
                a = deref(a)
            if type(a) is not Sym:
                continue
            lst = self._at(pos, a)
            if best is None or len(lst) < len(best):
                best = lst
                if not best:
                    break
        return self.clauses if best is None else best


class _Table:
    __slots__ = ("answers", "seen", "complete", "index", "low", "epoch", "waits")

    def __init__(self):
        self.answers = []
        self.seen = set()
        self.complete = False
        self.index = -1
        self.low = -1
        self.epoch = -1
        self.waits = False


class _DepthExceeded(Exception):
    pass


# ---------------------------------------------------------------- the engine

class Store:
    """An immutable compiled clause store shareable across solves."""

    def __init__(self, clauses, check_range: bool = True):
        self.syms = _Symbols()
        self.preds = {}
        for i, c in enumerate(clauses):
            if check_range and c.head.kind != AUX:
                _check_range(c)
            self._add(i, c)

    def _add(self, i, c: RuntimeClause):
        key, clause = _compile_clause(i, c, self.syms)
        self.preds.setdefault(key, _Pred()).add(clause)


def _check_range(c: RuntimeClause):
    body_vars = set()
    for b in c.body:
        for t in b.args:
            body_vars.update(term_vars(t.expr if isinstance(t, ExternalTerm) else t))
    for t in c.head.args:
        for v in term_vars(t):
            if v not in body_vars:
                raise LoadError(f"variable ?{v.name} occurs only in the conclusion of a clause")


def _compile_clause(i, c: RuntimeClause, syms):
    vmap = {}
    head = tuple(_compile_term(t, syms, vmap) for t in c.head.args)
    body = tuple((_pred_key(b, syms), b.kind,
                  tuple(_compile_term(t, syms, vmap) for t in b.args)) for b in c.body)
    return _pred_key(c.head, syms), _Clause(i, head, body, len(vmap))


class _Solver:
    def __init__(self, store: Store, config: EngineConfig, extra=()):
        self.store = store
        self.config = config
        self.syms = store.syms
        self.preds = store.preds
        if extra:
            self.preds = dict(store.preds)
            base = sum(len(p.clauses) for p in self.preds.values())
            local = {}
            for j, c in enumerate(extra):
                key, clause = _compile_clause(base + j, c, self.syms)
                p = local.get(key)
                if p is None:
                    p = local[key] = _Pred()
                    for old in store.preds[key].clauses if key in store.preds else ():
                        p.add(old)
                    self.preds[key] = p
                p.add(clause)
        self.trail = []
        self.unnamed = 0
        self.tables = {}
        self.stack = []
        self.members = []
        self.epoch = 0
        self.changes = 0
        self.depth_exceeded = False
        self.limit = config.depth_limit

    # --- unification -------------------------------------------------
    def bind(self, r, t):
        r.val = t
        self.trail.append(r)

    def undo(self, mark):
        tr = self.trail
        while len(tr) > mark:
            tr.pop().val = None

    def occurs(self, r, t):
        t = deref(t)
        if t is r:
            return True
        if type(t) is Cmp and not t.ground:
            return any(self.occurs(r, x) for x in t.args)
        return False

    def unify(self, a, b):
        a = deref(a)
        b = deref(b)
        if a is b:
            return True
        if type(a) is Ref:
            if self.config.occurs_check and self.occurs(a, b):
                return False
            self.bind(a, b)
            return True
        if type(b) is Ref:
            if self.config.occurs_check and self.occurs(b, a):
                return False
            self.bind(b, a)
            return True
        if type(a) is Cmp and type(b) is Cmp:
            if a.ground and b.ground:
                return a == b
            if a.f is not b.f or len(a.args) != len(b.args):
                return False
            for x, y in zip(a.args, b.args):
                if not self.unify(x, y):
                    return False
            return True
        return False

    def unify_head(self, tmpl, t, frame):
        """Unify a clause-template term with a runtime term, filling frame."""
        tt = type(tmpl)
        if tt is Sym:
            t = deref(t)
            if t is tmpl:
                return True
            if type(t) is Ref:
                self.bind(t, tmpl)
                return True
            return False
        if tt is _Tmpl:
            cur = frame[tmpl.i]
            if cur is None:
                frame[tmpl.i] = t
                return True
            return self.unify(cur, t)
        t = deref(t)
        if type(t) is Ref:
            built = self.build(tmpl, frame)
            if self.config.occurs_check and self.occurs(t, built):
                return False
            self.bind(t, built)
            return True
        if type(t) is not Cmp or len(t.args) != len(tmpl) - 1 or t.f is not tmpl[0]:
            return False
        for x, y in zip(tmpl[1:], t.args):
            if not self.unify_head(x, y, frame):
                return False
        return True

    def build(self, tmpl, frame):
        tt = type(tmpl)
        if tt is Sym:
            return tmpl
        if tt is _Tmpl:
            v = frame[tmpl.i]
            if v is None:
                v = frame[tmpl.i] = Ref()
            elif type(v) is Ref:
                v = deref(v)
            return v
        return Cmp(tmpl[0], tuple(self.build(x, frame) for x in tmpl[1:]))

    # --- answer templates --------------------------------------------
    def freeze(self, t, vmap):
        """Copy t with unbound variables replaced by numbered slots."""
        t = deref(t)
        tt = type(t)
        if tt is Sym:
            return t
        if tt is Ref:
            n = vmap.get(t)
            if n is None:
                n = vmap[t] = _Slot(len(vmap))
            return n
        if t.ground:
            return t
        return Cmp(t.f, tuple(self.freeze(x, vmap) for x in t.args))

    def thaw(self, t, fresh):
        tt = type(t)
        if tt is _Slot:
            r = fresh.get(t.i)
            if r is None:
                r = fresh[t.i] = Ref()
            return r
        if tt is Cmp and not t.ground:
            return Cmp(t.f, tuple(self.thaw(x, fresh) for x in t.args))
        return t

    # --- evaluation --------------------------------------------------
    def to_ast(self, t):
        t = deref(t)
        if type(t) is Sym:
            return t.ast
        if type(t) is Ref:
            if t.name is None:
                self.unnamed += 1
                t.name = f"_G{self.unnamed}"
            return Var(t.name)
        if t.f is EXT:
            return ExternalTerm(Expr(t.args[0].ast, tuple(self.to_ast(x) for x in t.args[1:])))
        return Expr(t.f.ast, tuple(self.to_ast(x) for x in t.args))

    def evaluate(self, t, goal):
        t = deref(t)
        if type(t) is Ref:
            raise InstantiationError(f"unbound variable in built-in goal {goal}")
        if type(t) is Cmp and t.f is EXT:
            args = [self.evaluate(x, goal) for x in t.args[1:]]
            iri = t.args[0].ast
            v = evaluate_builtin(iri, args)
            if not isinstance(v, Number):
                raise BuiltinTypeError(f"{iri} is not a function")
            return v
        if type(t) is Cmp:
            if not self.resolved_ground(t):
                raise InstantiationError(f"unbound variable in built-in goal {goal}")
            return self.to_ast(t)
        return t.ast

    def resolved_ground(self, t):
        t = deref(t)
        if type(t) is Ref:
            return False
        if type(t) is Cmp and not t.ground:
            return all(self.resolved_ground(x) for x in t.args)
        return True

    def goals(self, goals, depth):
        """Solve a conjunction of (key, kind, args) goals with live args."""
        if not goals:
            yield
            return
        key, kind, args = goals[0]
        rest = goals[1:]
        for _ in self.goal(key, kind, args, depth):
            yield from self.goals(rest, depth)

    def goal(self, key, kind, args, depth):
        if kind == EQUAL:
            left, right = (deref(a) for a in args)
            if type(left) is Cmp and left.f is EXT:
                left = self.syms(self.evaluate(left, "="))
            if type(right) is Cmp and right.f is EXT:
                right = self.syms(self.evaluate(right, "="))
            mark = len(self.trail)
            if self.unify(left, right):
                yield
            self.undo(mark)
            return
        if kind == BUILTIN:
            name = key[1]
            vals = [self.evaluate(a, name) for a in args]
            r = evaluate_builtin(name, vals)
            if not isinstance(r, bool):
                raise BuiltinTypeError(f"{name} is not a predicate")
            if r:
                yield
            return
        if self.limit is not None and depth >= self.limit:
            self.depth_exceeded = True
            return
        if self.config.tabling:
            yield from self.tabled(key, args, depth)
        else:
            yield from self.resolve(key, args, depth)

    def resolve(self, key, args, depth):
        pred = self.preds.get(key)
        if pred is None:
            return
        for c in pred.candidates(args):
            mark = len(self.trail)
            frame = [None] * c.nvars
            ok = True
            for tm, a in zip(c.head, args):
                if not self.unify_head(tm, a, frame):
                    ok = False
                    break
            if ok:
                if c.body:
                    body = [(k, kd, tuple(self.build(t, frame) for t in bargs))
                            for k, kd, bargs in c.body]
                    yield from self.goals(body, depth + 1)
                else:
                    yield
            self.undo(mark)

    def tabled(self, key, args, depth):
        vmap = {}
        frozen = tuple(self.freeze(a, vmap) for a in args)
        tkey = (key, frozen)
        tab = self.tables.get(tkey)
        if tab is None or (not tab.complete and tab.index < 0 and tab.epoch != self.epoch):
            if tab is None:
                tab = self.tables[tkey] = _Table()
            self.evaluate_table(tab, key, frozen, depth)
        if not tab.complete and self.stack:
            # consuming an incomplete table: the caller shares its fixpoint
            top = self.stack[-1]
            top.waits = True
            ref = tab.index if tab.index >= 0 else tab.low
            if ref >= 0 and ref < top.low:
                top.low = ref
        answers = tab.answers if tab.complete else list(tab.answers)
        for ans, ground in answers:
            mark = len(self.trail)
            if ground:
                inst = ans
            else:
                fresh = {}
                inst = tuple(self.thaw(x, fresh) for x in ans)
            ok = True
            for a, v in zip(args, inst):
                if not self.unify(a, v):
                    ok = False
                    break
            if ok:
                yield
            self.undo(mark)

    def evaluate_table(self, tab, key, frozen, depth):
        tab.index = tab.low = len(self.stack)
        self.stack.append(tab)
        cpos = len(self.members)
        self.members.append(tab)
        while True:
            tab.waits = False
            before = self.changes
            fresh = {}
            call = tuple(self.thaw(x, fresh) for x in frozen)
            for _ in self.resolve(key, call, depth):
                vmap = {}
                ans = tuple(self.freeze(a, vmap) for a in call)
                if ans not in tab.seen:
                    tab.seen.add(ans)
                    tab.answers.append((ans, not vmap))
                    self.changes += 1
            if tab.low < tab.index:
                # part of an enclosing fixpoint: the leader will revisit
                tab.epoch = self.epoch
                break
            if not tab.waits or self.changes == before:
                for t in self.members[cpos:]:
                    t.complete = True
                del self.members[cpos:]
                break
            self.epoch += 1
        self.stack.pop()
        tab.index = -1
        if not tab.complete and self.stack and tab.low < self.stack[-1].low:
            self.stack[-1].low = tab.low


def _prepare_goals(store_syms, goals):
    vmap = {}
    comp = tuple((_pred_key(g, store_syms), g.kind,
                  tuple(_compile_term(t, store_syms, vmap) for t in g.args)) for g in goals)
    return comp, vmap


def _run_with_stack(fn):
    """Run fn on a thread with a large stack so deep derivations fit."""
    result, error = [], []

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 200000))
        try:
            result.append(fn())
        except RecursionError:
            error.append(DerivationTooDeep(
                "derivation exceeded the recursion budget; enable tabling or set a depth limit"))
        except BaseException as e:
            error.append(e)
        finally:
            sys.setrecursionlimit(old)

    with _STACK_LOCK:
        prev = threading.stack_size()
        threading.stack_size(512 * 1024 * 1024)
        try:
            t = threading.Thread(target=target)
            t.start()
        finally:
            threading.stack_size(prev)
    t.join()
    if error:
        raise error[0]
    return result[0]


_STACK_LOCK = threading.Lock()


def solve_goals(store: Store, goals, answer_vars, config: EngineConfig, extra=()) -> Answer:
    """Enumerate answers to runtime goals; bindings restricted to answer_vars."""
    def run():
        solver = _Solver(store, config, extra)
        comp, vmap = _prepare_goals(store.syms, goals)
        frame = [None] * len(vmap)
        live = [(k, kd, tuple(solver.build(t, frame) for t in args)) for k, kd, args in comp]
        index = {v: frame[vmap[v].i] if v in vmap else None for v in answer_vars}
        seen, out = set(), []
        success = False
        for _ in solver.goals(live, 0):
            success = True
            row = tuple((v, solver.to_ast(index[v]) if index[v] is not None else v)
                        for v in answer_vars)
            if row not in seen:
                seen.add(row)
                out.append(dict(row))
                if config.max_answers is not None and len(out) >= config.max_answers:
                    break
        return Answer(success, out if answer_vars else [], tuple(answer_vars), solver.depth_exceeded)
    return _run_with_stack(run)


def solve(clauses, query, config: EngineConfig = EngineConfig(), answer_vars=None) -> Answer:
    """Answer a pipelined query formula against runtime clauses.

    answer_vars defaults to the free variables of the query; pass the
    original query's variables when the pipeline introduced helpers."""
    store = clauses if isinstance(clauses, Store) else Store(clauses)
    if answer_vars is None:
        answer_vars = [v for v in free_vars(query) if not v.name.startswith("_")]
    goals, aux = query_to_runtime(query)
    return solve_goals(store, goals, tuple(answer_vars), config, aux)


class Engine:
    """A KB pipelined and compiled once, queried many times."""

    def __init__(self, kb: KB, config: EngineConfig = EngineConfig()):
        self.config = config
        self.source = kb
        mode = config.objectification
        self.kb = run_pipeline(kb, mode, "engine")
        pre = rewrite_subpredicates(unnest(expand_defaults(kb)))
        self.arities = relational_arities(pre) if mode is ObjectificationMode.STATIC_DYNAMIC else {}
        self.clauses = to_runtime(self.kb)
        self.store = Store(self.clauses)

    def prepare(self, query):
        return prepare_query(query, self.source, self.config.objectification, self.arities)

    def ask(self, query, config: Optional[EngineConfig] = None) -> Answer:
        config = config or self.config
        answer_vars = tuple(free_vars(query))
        f = self.prepare(query)
        goals, aux = query_to_runtime(f)
        return solve_goals(self.store, goals, answer_vars, config, aux)


def ask(kb: KB, query, config: EngineConfig = EngineConfig()) -> Answer:
    return Engine(kb, config).ask(query)


def answer_format(answer: Answer, abridged: bool = True, prefixes=()) -> str:
    """`success`, `fail`, or one `?var=value` line per substitution."""
    from .printer import print_term
    if not answer.success:
        return "fail"
    if not answer.variables or not answer.bindings:
        return "success"
    lines = []
    for b in answer.bindings:
        lines.append(" ".join(f"?{v.name}={print_term(b[v], abridged, prefixes)}"
                              for v in answer.variables))
    return "\n".join(lines)
