"""KB-to-KB translation steps.

Every stage is a pure function over `KB` values. `run_pipeline` chains them
in the fixed order: default expansion, unnesting, subpredicate rewriting,
objectification, describution, and for the Horn targets Skolemization,
conjunctive-conclusion splitting and external flattening.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Callable, Optional

from .core import (KB, TOP, And, Atom, DefaultFact, Equal, Exists, Expr,
                   External, ExternalTerm, Local, Or, Rule, Slot, Subclass,
                   Tuple, Var, free_vars, is_ground, revert_top_dependents,
                   rule_free_vars, term_vars, canonicalize)


class TransformError(Exception):
    pass


class ObjectificationMode(str, Enum):
    STATIC = "static"
    STATIC_DYNAMIC = "dynamic"


def as_mode(mode) -> ObjectificationMode:
    if isinstance(mode, ObjectificationMode):
        return mode
    m = str(mode).lower().replace("/", "").replace("_", "").replace("-", "")
    if m in ("static",):
        return ObjectificationMode.STATIC
    if m in ("dynamic", "staticdynamic"):
        return ObjectificationMode.STATIC_DYNAMIC
    raise ValueError(f"unknown objectification mode {mode!r}")


VIRTUAL_OID = Local("oidcons")
STAGES = ("defaults", "unnest", "subpredicates", "objectify", "describute",
          "skolemize", "split", "flatten")


# ------------------------------------------------------------- name supply

def _collect_names(x, locals_: set, vars_: set):
    """Gather every Local name and variable name occurring in x."""
    if isinstance(x, Local):
        locals_.add(x.name)
    elif isinstance(x, Var):
        vars_.add(x.name)
    elif isinstance(x, (tuple, list)):
        for y in x:
            _collect_names(y, locals_, vars_)
    elif isinstance(x, KB):
        _collect_names(x.asserts, locals_, vars_)
        _collect_names(x.queries, locals_, vars_)
    elif hasattr(x, "__dataclass_fields__"):
        for f in x.__dataclass_fields__:
            _collect_names(getattr(x, f), locals_, vars_)


class Fresh:
    """Deterministic supply of unused names for one pipeline run."""

    def __init__(self, *scopes):
        self.locals, self.vars = set(), set()
        for s in scopes:
            _collect_names(s, self.locals, self.vars)
        self.counters = {}

    def var(self, stem: str) -> Var:
        n = self.counters.get(stem, 0)
        while True:
            n += 1
            name = f"{stem}{n}"
            if name not in self.vars:
                break
        self.counters[stem] = n
        self.vars.add(name)
        return Var(name)

    def local(self, stem: str) -> Local:
        n = self.counters.get("L" + stem, 0)
        while True:
            n += 1
            name = f"{stem}{n}"
            if name not in self.locals:
                break
        self.counters["L" + stem] = n
        self.locals.add(name)
        return Local(name)

    def oid_constant(self) -> Local:
        """Smallest positive integer j such that `_j` is unused."""
        return self.local("")


# ------------------------------------------------------------ generic walks

def _map_clauses(kb: KB, fn: Callable) -> KB:
    out = []
    for c in kb.asserts:
        r = fn(c)
        if isinstance(r, list):
            out.extend(r)
        else:
            out.append(r)
    return kb.replace(asserts=tuple(out))


def _flatten_and(items) -> list:
    out = []
    for x in items:
        if isinstance(x, And):
            out.extend(_flatten_and(x.items))
        else:
            out.append(x)
    return out


# --------------------------------------------------------- default expansion

def expand_defaults(kb: KB) -> KB:
    """Rewrite each default fact P{...} to the rule it abbreviates."""
    if not any(isinstance(c, DefaultFact) for c in kb.asserts):
        return kb
    fresh = Fresh(kb)

    def one(c):
        if not isinstance(c, DefaultFact):
            return c
        o = Var("o") if "o" not in fresh.vars else fresh.var("o")
        has_dep = any(d.dep for d in c.descs)
        head = Atom(c.pred if has_dep else TOP, c.descs, o)
        body = Atom(c.pred, (), o)
        r = Rule(head, body, (o,))
        return Rule(head, body, (o,) + tuple(v for v in rule_free_vars(r) if v != o))

    return _map_clauses(kb, one)


# ------------------------------------------------------------------ unnesting

def _unnest_term(t, hoisted: list):
    if isinstance(t, Atom):
        if t.oid is None:
            raise TransformError("oidless atom in term position")
        a = _unnest_atom(t, hoisted)
        hoisted.append(a)
        return a.oid
    if isinstance(t, Expr):
        return Expr(_unnest_term(t.fn, hoisted), tuple(_unnest_term(x, hoisted) for x in t.args))
    if isinstance(t, ExternalTerm):
        return ExternalTerm(_unnest_term(t.expr, hoisted))
    return t


def _unnest_atom(a: Atom, hoisted: list) -> Atom:
    oid = None if a.oid is None else _unnest_term(a.oid, hoisted)
    pred = _unnest_term(a.pred, hoisted)
    descs = []
    for d in a.descs:
        if isinstance(d, Tuple):
            descs.append(Tuple(tuple(_unnest_term(x, hoisted) for x in d.terms), d.dep))
        else:
            descs.append(Slot(_unnest_term(d.name, hoisted), _unnest_term(d.filler, hoisted), d.dep))
    return Atom(pred, tuple(descs), oid)


def _unnest_formula(f):
    if isinstance(f, And):
        return And(tuple(_unnest_formula(x) for x in f.items))
    if isinstance(f, Or):
        return Or(tuple(_unnest_formula(x) for x in f.items))
    if isinstance(f, Exists):
        return Exists(f.vars, _unnest_formula(f.body))
    hoisted = []
    if isinstance(f, Atom):
        g = _unnest_atom(f, hoisted)
    elif isinstance(f, External):
        g = External(_unnest_atom(f.atom, hoisted))
    elif isinstance(f, Equal):
        g = Equal(_unnest_term(f.left, hoisted), _unnest_term(f.right, hoisted))
    elif isinstance(f, Subclass):
        g = Subclass(_unnest_term(f.sub, hoisted), _unnest_term(f.sup, hoisted))
    else:
        raise TypeError(f"not a formula: {f!r}")
    if not hoisted:
        return f
    return And(tuple(hoisted) + (g,))


def unnest(kb: KB) -> KB:
    """Hoist oidful atoms out of term positions, leaving their OIDs behind."""
    def one(c):
        if isinstance(c, DefaultFact):
            return c
        head = _unnest_formula(c.head)
        body = None if c.body is None else _unnest_formula(c.body)
        return c if (head is c.head and body is c.body) else Rule(head, body, c.vars)
    kb2 = _map_clauses(kb, one)
    return kb2.replace(queries=tuple(_unnest_formula(q) for q in kb.queries))


# ------------------------------------------------------ subpredicate rewrite

def _has_subclass(f) -> bool:
    if isinstance(f, Subclass):
        return True
    if isinstance(f, (And, Or)):
        return any(_has_subclass(x) for x in f.items)
    if isinstance(f, Exists):
        return _has_subclass(f.body)
    return False


def rewrite_subpredicates(kb: KB) -> KB:
    """Turn each ground fact f##g into Forall ?o (?o#g :- ?o#f)."""
    def one(c):
        if isinstance(c, DefaultFact):
            return c
        if isinstance(c.head, Subclass) and c.body is None:
            s = c.head
            if not (is_ground(s.sub) and is_ground(s.sup)):
                raise TransformError("subclass formulas with variables are not supported")
            o = Var("o")
            return Rule(Atom(s.sup, (), o), Atom(s.sub, (), o), (o,))
        if _has_subclass(c.head) or (c.body is not None and _has_subclass(c.body)):
            raise TransformError("subclass formulas are only supported as ground facts")
        return c
    for q in kb.queries:
        if _has_subclass(q):
            raise TransformError("subclass formulas are not supported in queries")
    return _map_clauses(kb, one)


# ----------------------------------------------------- relational predicates

def _all_atoms(f, acc: list):
    if isinstance(f, (And, Or)):
        for x in f.items:
            _all_atoms(x, acc)
    elif isinstance(f, Exists):
        _all_atoms(f.body, acc)
    elif isinstance(f, Atom):
        acc.append(f)
    return acc


def relational_arities(kb: KB) -> dict:
    """Map each relational predicate of the KB to its tuple length."""
    shape: dict = {}
    for c in kb.asserts:
        atoms = []
        if isinstance(c, DefaultFact):
            atoms.append(Atom(c.pred, c.descs))
        else:
            _all_atoms(c.head, atoms)
            if c.body is not None:
                _all_atoms(c.body, atoms)
            if isinstance(c.head, Subclass):
                for t in (c.head.sub, c.head.sup):
                    shape[t] = None
        for a in atoms:
            p = a.pred
            if isinstance(p, Var):
                continue
            ok = (a.oid is None and len(a.descs) == 1
                  and isinstance(a.descs[0], Tuple) and a.descs[0].dep)
            n = len(a.descs[0].terms) if ok else None
            if not ok or (p in shape and shape[p] != n):
                shape[p] = None
            elif p not in shape:
                shape[p] = n
    return {p: n for p, n in shape.items() if n is not None and p != TOP}


def detect_relational_predicates(kb: KB) -> frozenset:
    """Predicates occurring only in oidless atoms with one dependent tuple."""
    return frozenset(relational_arities(kb))


# ------------------------------------------------------------ objectification

def _objectify_static_head(f, oid_for):
    if isinstance(f, Atom):
        return f if f.oid is not None else oid_for(f)
    if isinstance(f, And):
        return And(tuple(_objectify_static_head(x, oid_for) for x in f.items))
    if isinstance(f, Exists):
        return Exists(f.vars, _objectify_static_head(f.body, oid_for))
    return f


def _objectify_condition(f, relset, fresh: Fresh, new_vars: list):
    if isinstance(f, Atom):
        if f.oid is not None or f.pred in relset:
            return f
        v = fresh.var("_o")
        new_vars.append(v)
        return Atom(f.pred, f.descs, v)
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_objectify_condition(x, relset, fresh, new_vars) for x in f.items))
    if isinstance(f, Exists):
        return Exists(f.vars, _objectify_condition(f.body, relset, fresh, new_vars))
    return f


def objectify(kb: KB, mode=ObjectificationMode.STATIC) -> KB:
    """Give every non-relational oidless atom an OID.

    Ground facts receive fresh `_j` constants, other rule conclusions a head
    existential (Skolemized later), conditions and queries fresh variables.
    Under static/dynamic mode relational predicates stay oidless.
    """
    mode = as_mode(mode)
    arities = relational_arities(kb) if mode is ObjectificationMode.STATIC_DYNAMIC else {}
    relset = frozenset(arities)
    fresh = Fresh(kb)

    def one(c):
        if isinstance(c, DefaultFact):
            return c
        new_vars = []
        body = None if c.body is None else _objectify_condition(c.body, relset, fresh, new_vars)
        if c.body is None and not c.vars:
            def oid_for(a):
                if a.pred in relset:
                    return a
                return Atom(a.pred, a.descs, fresh.oid_constant())
        else:
            def oid_for(a):
                if a.pred in relset:
                    return a
                v = fresh.var("_o")
                return Exists((v,), Atom(a.pred, a.descs, v))
        head = _objectify_static_head(c.head, oid_for)
        if head == c.head and body == c.body:
            return c
        return Rule(head, body, c.vars + tuple(new_vars))

    kb2 = _map_clauses(kb, one)
    queries = tuple(objectify_query(q, mode, arities, fresh) for q in kb.queries)
    return kb2.replace(queries=queries)


def _var_occurrences(f, counts: dict):
    for a in _all_atoms(f, []):
        for v in _term_list_vars(a):
            counts[v] = counts.get(v, 0) + 1
    for g in _non_atoms(f):
        for v in free_vars(g):
            counts[v] = counts.get(v, 0) + 1


def _term_list_vars(a: Atom) -> list:
    out = []
    terms = ([a.oid] if a.oid is not None else []) + [a.pred]
    for d in a.descs:
        terms.extend(d.terms if isinstance(d, Tuple) else (d.name, d.filler))
    for t in terms:
        out.extend(term_vars(t))
    return out


def _non_atoms(f):
    if isinstance(f, (And, Or)):
        for x in f.items:
            yield from _non_atoms(x)
    elif isinstance(f, Exists):
        yield from _non_atoms(f.body)
    elif not isinstance(f, Atom):
        yield f


def dynamic_objectify_query_atom(atom: Atom, arities: dict, demanded: bool, fresh: Fresh):
    """Query-time treatment of an atom over a relational predicate.

    The atom is answered by the stored relationship; an OID is only
    materialized, as the virtual term oidcons(f t1 ... tn), when `demanded`.
    Shapes the relationship cannot support (slots, independent tuples,
    wrong tuple length) yield the always-false Or().
    """
    n = arities[atom.pred]
    dep_tuples = [d for d in atom.descs if isinstance(d, Tuple) and d.dep]
    if len(dep_tuples) != len(atom.descs) or any(len(d.terms) != n for d in dep_tuples):
        return Or(())
    if dep_tuples:
        args = dep_tuples[0].terms
    else:
        args = tuple(fresh.var("_t") for _ in range(n))
    conj = [Atom(atom.pred, (Tuple(args, True),))]
    for d in dep_tuples[1:]:
        conj.extend(Equal(x, y) for x, y in zip(d.terms, args))
    if atom.oid is not None and demanded:
        conj.append(Equal(atom.oid, Expr(VIRTUAL_OID, (atom.pred,) + tuple(args))))
    if len(conj) == 1:
        return conj[0]
    return And(tuple(conj))


def objectify_query(q, mode, arities: dict, fresh: Optional[Fresh] = None):
    """Objectify a query: fresh OID variables, dynamic OIDs for relations."""
    mode = as_mode(mode)
    if fresh is None:
        fresh = Fresh(q)
    else:
        _collect_names(q, fresh.locals, fresh.vars)
    relset = frozenset(arities) if mode is ObjectificationMode.STATIC_DYNAMIC else frozenset()
    answer = set(free_vars(q))
    counts: dict = {}
    _var_occurrences(q, counts)

    def walk(f):
        if isinstance(f, Atom):
            if f.pred in relset:
                oid = f.oid
                demanded = oid is not None and not (
                    isinstance(oid, Var) and oid not in answer and counts.get(oid, 0) <= 1)
                return dynamic_objectify_query_atom(f, arities, demanded, fresh)
            if f.oid is None:
                return Atom(f.pred, f.descs, fresh.var("_o"))
            return f
        if isinstance(f, (And, Or)):
            return type(f)(tuple(walk(x) for x in f.items))
        if isinstance(f, Exists):
            return Exists(f.vars, walk(f.body))
        return f

    return walk(q)


# ------------------------------------------------------------------ describution

def describute_atom(a: Atom, condition: bool = False):
    """Membership plus one single-descriptor atom per descriptor, with
    independent descriptors evacuated to Top.

    In a condition with a variable OID the membership goes last, so that
    the descriptors bind the OID before the membership is proved."""
    if a.oid is None:
        return a
    if a.pred == TOP:
        a = revert_top_dependents(a)
    member = Atom(a.pred, (), a.oid)
    if not a.descs:
        return member
    parts = [member]
    for d in canonicalize(a).descs:
        parts.append(Atom(a.pred if d.dep else TOP, (d,), a.oid))
    if condition and isinstance(a.oid, Var):
        parts.append(parts.pop(0))
    return And(tuple(parts))


def _describute_formula(f, condition=False):
    if isinstance(f, Atom):
        return describute_atom(f, condition)
    if isinstance(f, And):
        items = _flatten_and(f.items)
        members = {(x.oid, x.pred) for x in items
                   if isinstance(x, Atom) and x.oid is not None and not x.descs}
        member_oids = {o for o, _ in members}
        out = []
        for x in items:
            if (isinstance(x, Atom) and x.oid is not None and len(x.descs) == 1
                    and ((x.oid, x.pred) in members or (x.pred == TOP and x.oid in member_oids))):
                out.append(revert_top_dependents(x))
            else:
                out.append(_describute_formula(x, condition))
        return And(tuple(_flatten_and(out)))
    if isinstance(f, Or):
        return Or(tuple(_describute_formula(x, condition) for x in f.items))
    if isinstance(f, Exists):
        return Exists(f.vars, _describute_formula(f.body, condition))
    return f


def describute(x):
    """Describute a formula, a clause, or every clause and query of a KB."""
    if isinstance(x, KB):
        return x.replace(asserts=tuple(describute(c) for c in x.asserts),
                         queries=tuple(_describute_formula(q, True) for q in x.queries))
    if isinstance(x, Rule):
        head = _describute_formula(x.head)
        body = None if x.body is None else _describute_formula(x.body, True)
        return Rule(head, body, x.vars)
    if isinstance(x, DefaultFact):
        return x
    return _describute_formula(x)


# -------------------------------------------------------------- Skolemization

def substitute(x, s: dict):
    if not s:
        return x
    if isinstance(x, Var):
        return s.get(x, x)
    if isinstance(x, Expr):
        return Expr(substitute(x.fn, s), tuple(substitute(a, s) for a in x.args))
    if isinstance(x, ExternalTerm):
        return ExternalTerm(substitute(x.expr, s))
    if isinstance(x, Atom):
        descs = tuple(Tuple(tuple(substitute(t, s) for t in d.terms), d.dep) if isinstance(d, Tuple)
                      else Slot(substitute(d.name, s), substitute(d.filler, s), d.dep)
                      for d in x.descs)
        return Atom(substitute(x.pred, s), descs, None if x.oid is None else substitute(x.oid, s))
    if isinstance(x, (And, Or)):
        return type(x)(tuple(substitute(y, s) for y in x.items))
    if isinstance(x, Exists):
        inner = {k: v for k, v in s.items() if k not in x.vars}
        return Exists(x.vars, substitute(x.body, inner))
    if isinstance(x, Equal):
        return Equal(substitute(x.left, s), substitute(x.right, s))
    if isinstance(x, Subclass):
        return Subclass(substitute(x.sub, s), substitute(x.sup, s))
    if isinstance(x, External):
        return External(substitute(x.atom, s))
    return x


def _has_head_exists(f) -> bool:
    if isinstance(f, Exists):
        return True
    if isinstance(f, And):
        return any(_has_head_exists(x) for x in f.items)
    return False


def skolemize(kb: KB) -> KB:
    """Replace head existentials by skolemN(...) over the universal variables
    free in the existential's scope.

    Leaving out condition-only variables keeps Skolem terms from nesting
    through recursive rules, so Datalog-like KBs keep a finite model."""
    if not any(isinstance(c, Rule) and _has_head_exists(c.head) for c in kb.asserts):
        return kb
    fresh = Fresh(kb)

    def strip(f, univ):
        if isinstance(f, Exists):
            scope = set(free_vars(f))
            args = tuple(v for v in univ if v in scope)
            s = {}
            for v in f.vars:
                fn = fresh.local("skolem")
                s[v] = Expr(fn, args) if args else fn
            return strip(substitute(f.body, s), univ)
        if isinstance(f, And):
            return And(tuple(strip(x, univ) for x in f.items))
        return f

    def one(c):
        if isinstance(c, DefaultFact) or not _has_head_exists(c.head):
            return c
        return Rule(strip(c.head, c.vars), c.body, c.vars)

    return _map_clauses(kb, one)


# ---------------------------------------------------------------- splitting

def split_conjunctive_conclusions(kb: KB) -> KB:
    """One clause per conclusion conjunct."""
    def one(c):
        if isinstance(c, DefaultFact) or not isinstance(c.head, And):
            return c
        out = []
        for h in _flatten_and(c.head.items):
            r = Rule(h, c.body, ())
            used = set(rule_free_vars(r))
            out.append(Rule(h, c.body, tuple(v for v in c.vars if v in used)))
        return out
    return _map_clauses(kb, one)


# --------------------------------------------------------------- flattening

def _has_external_term(t) -> bool:
    if isinstance(t, ExternalTerm):
        return True
    if isinstance(t, Expr):
        return _has_external_term(t.fn) or any(_has_external_term(a) for a in t.args)
    if isinstance(t, Atom):
        return any(_has_external_term(x) for x in _atom_terms(t))
    return False


def _atom_terms(a: Atom) -> list:
    ts = ([a.oid] if a.oid is not None else []) + [a.pred]
    for d in a.descs:
        ts.extend(d.terms if isinstance(d, Tuple) else (d.name, d.filler))
    return ts


def _hoist_term(t, eqs: list, fresh: Fresh, new_vars: list):
    if isinstance(t, ExternalTerm):
        v = fresh.var("_v")
        new_vars.append(v)
        eqs.append(Equal(v, t))
        return v
    if isinstance(t, Expr):
        return Expr(_hoist_term(t.fn, eqs, fresh, new_vars),
                    tuple(_hoist_term(a, eqs, fresh, new_vars) for a in t.args))
    return t


def _flatten_condition(f, fresh: Fresh, new_vars: list):
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_flatten_condition(x, fresh, new_vars) for x in f.items))
    if isinstance(f, Exists):
        return Exists(f.vars, _flatten_condition(f.body, fresh, new_vars))
    eqs = []
    if isinstance(f, Atom):
        if not _has_external_term(f):
            return f
        g = substitute_terms(f, lambda t: _hoist_term(t, eqs, fresh, new_vars))
    elif isinstance(f, Equal):
        def side(t):
            if isinstance(t, ExternalTerm):
                return t
            return _hoist_term(t, eqs, fresh, new_vars)
        if not any(_has_external_term(t) and not isinstance(t, ExternalTerm) for t in (f.left, f.right)):
            return f
        g = Equal(side(f.left), side(f.right))
    else:
        return f
    return And(tuple(eqs) + (g,))


def substitute_terms(a: Atom, fn) -> Atom:
    descs = tuple(Tuple(tuple(fn(t) for t in d.terms), d.dep) if isinstance(d, Tuple)
                  else Slot(fn(d.name), fn(d.filler), d.dep) for d in a.descs)
    return Atom(fn(a.pred), descs, None if a.oid is None else fn(a.oid))


def _head_has_external(f) -> bool:
    if isinstance(f, Atom):
        return _has_external_term(f)
    if isinstance(f, Equal):
        return _has_external_term(f.left) or _has_external_term(f.right)
    if isinstance(f, (And, Or)):
        return any(_head_has_external(x) for x in f.items)
    if isinstance(f, Exists):
        return _head_has_external(f.body)
    return False


def flatten_externals(kb: KB) -> KB:
    """Bind nested External(...) expressions to fresh variables ahead of use."""
    fresh = Fresh(kb)

    def one(c):
        if isinstance(c, DefaultFact):
            return c
        if _head_has_external(c.head):
            raise TransformError("External expression in a fact or conclusion cannot be evaluated")
        if c.body is None:
            return c
        new_vars = []
        body = _flatten_condition(c.body, fresh, new_vars)
        if not new_vars:
            return c
        return Rule(c.head, body, c.vars + tuple(new_vars))

    kb2 = _map_clauses(kb, one)
    return kb2.replace(queries=tuple(_flatten_condition(q, fresh, []) for q in kb.queries))


# ------------------------------------------------------------------ pipeline

def run_pipeline(kb: KB, mode=ObjectificationMode.STATIC, target: str = "engine",
                 on_stage: Optional[Callable[[str, KB], None]] = None) -> KB:
    """Apply the translation chain for `target` ("engine", "prolog" or "tptp")."""
    mode = as_mode(mode)
    target = target.lower()
    if target not in ("engine", "prolog", "tptp"):
        raise ValueError(f"unknown target {target!r}")
    steps = [("defaults", expand_defaults), ("unnest", unnest),
             ("subpredicates", rewrite_subpredicates),
             ("objectify", lambda k: objectify(k, mode)), ("describute", describute)]
    if target != "tptp":
        steps += [("skolemize", skolemize), ("split", split_conjunctive_conclusions),
                  ("flatten", flatten_externals)]
    for name, fn in steps:
        kb = fn(kb)
        if on_stage is not None:
            on_stage(name, kb)
    return kb


def prepare_query(q, source_kb: KB, mode=ObjectificationMode.STATIC, arities: Optional[dict] = None):
    """Run a standalone query through the query-side stages."""
    mode = as_mode(mode)
    if arities is None:
        pre = rewrite_subpredicates(unnest(expand_defaults(source_kb)))
        arities = relational_arities(pre) if mode is ObjectificationMode.STATIC_DYNAMIC else {}
    f = _unnest_formula(q)
    if _has_subclass(f):
        raise TransformError("subclass formulas are not supported in queries")
    f = objectify_query(f, mode, arities)
    f = _describute_formula(f, True)
    return _flatten_condition(f, Fresh(f), [])


def _name_ok(name: str) -> bool:
    return re.match(r"[\w]", name) is not None
