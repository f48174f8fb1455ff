"""Horn-level encoding over the five reserved predicates, plus Prolog and
TPTP text emitters and a reader for the emitted Prolog."""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Optional

from .core import (KB, TOP, And, Atom, DefaultFact, Equal, Exists, Expr,
                   External, ExternalTerm, Iri, Literal, Local, Number, Or,
                   Rule, Slot, Subclass, Tuple, Var, XS_STRING, free_vars,
                   revert_top_dependents)

MEMTERM, TUPTERM, PRDTUPTERM = "memterm", "tupterm", "prdtupterm"
SLOTERM, PRDSLOTERM = "sloterm", "prdsloterm"
RESERVED = (MEMTERM, TUPTERM, PRDTUPTERM, SLOTERM, PRDSLOTERM)
REL, AUX, BUILTIN, EQUAL = "rel", "aux", "builtin", "equal"

PRED_NS = "http://www.w3.org/2007/rif-builtin-predicate#"
FUNC_NS = "http://www.w3.org/2007/rif-builtin-function#"


class ConversionError(Exception):
    pass


@dataclass(frozen=True)
class RuntimeAtom:
    """kind is a reserved name, "rel", "aux", "builtin" or "equal"; name is
    the relation term, auxiliary predicate name or built-in IRI."""
    kind: str
    args: tuple
    name: object = None

    @property
    def key(self):
        return (self.kind, self.name, len(self.args))


@dataclass(frozen=True)
class RuntimeClause:
    head: RuntimeAtom
    body: tuple = ()

    @property
    def is_fact(self) -> bool:
        return not self.body


# ------------------------------------------------------------------ mapping

def atom_to_runtime(a: Atom) -> Optional[RuntimeAtom]:
    """Map one descributed atom; None for the always-true o#Top."""
    if a.oid is None:
        if len(a.descs) != 1 or not isinstance(a.descs[0], Tuple) or not a.descs[0].dep:
            raise ConversionError(f"oidless atom is not relational: {a!r}")
        return RuntimeAtom(REL, a.descs[0].terms, a.pred)
    if a.pred == TOP:
        a = revert_top_dependents(a)
    o, f = a.oid, a.pred
    if not a.descs:
        if f == TOP:
            return None
        return RuntimeAtom(MEMTERM, (o, f))
    if len(a.descs) != 1:
        raise ConversionError(f"atom is not descributed: {a!r}")
    d = a.descs[0]
    if not d.dep and f != TOP:
        raise ConversionError(f"independent descriptor outside Top: {a!r}")
    if isinstance(d, Tuple):
        if d.dep:
            return RuntimeAtom(PRDTUPTERM, (o, f) + d.terms)
        return RuntimeAtom(TUPTERM, (o,) + d.terms)
    if d.dep:
        return RuntimeAtom(PRDSLOTERM, (o, f, d.name, d.filler))
    return RuntimeAtom(SLOTERM, (o, d.name, d.filler))


def _external_goal(e: External) -> RuntimeAtom:
    a = e.atom
    terms = ()
    for d in a.descs:
        if not isinstance(d, Tuple):
            raise ConversionError("built-in call with slots")
        terms += d.terms
    if not isinstance(a.pred, Iri):
        raise ConversionError(f"built-in name must be an IRI: {a.pred!r}")
    return RuntimeAtom(BUILTIN, terms, a.pred.iri)


class _Compiler:
    def __init__(self, prefix: str = "or"):
        self.prefix = prefix
        self.count = 0
        self.aux: list = []
        self.renames = 0

    def body(self, f) -> list:
        if isinstance(f, Atom):
            r = atom_to_runtime(f)
            return [] if r is None else [r]
        if isinstance(f, And):
            out = []
            for x in f.items:
                out.extend(self.body(x))
            return out
        if isinstance(f, Equal):
            return [RuntimeAtom(EQUAL, (f.left, f.right))]
        if isinstance(f, External):
            return [_external_goal(f)]
        if isinstance(f, Exists):
            from .transform import substitute
            s = {}
            for v in f.vars:
                self.renames += 1
                s[v] = Var(f"{v.name}~{self.renames}")
            return self.body(substitute(f.body, s))
        if isinstance(f, Or):
            self.count += 1
            name = f"{self.prefix}{self.count}"
            vs = tuple(free_vars(f))
            head = RuntimeAtom(AUX, vs, name)
            for branch in f.items:
                self.aux.append(RuntimeClause(head, tuple(self.body(branch))))
            return [head]
        raise ConversionError(f"cannot appear in a condition: {f!r}")

    def head(self, f) -> list:
        if isinstance(f, Atom):
            r = atom_to_runtime(f)
            return [] if r is None else [r]
        if isinstance(f, And):
            out = []
            for x in f.items:
                out.extend(self.head(x))
            return out
        raise ConversionError(f"not a Horn conclusion: {f!r}")


def to_runtime(kb: KB) -> list:
    """Clauses of a KB pipelined for the engine or Prolog target."""
    comp = _Compiler("or")
    out = []
    for c in kb.asserts:
        if isinstance(c, DefaultFact) or isinstance(c.head, Subclass):
            raise ConversionError("KB is not pipelined")
        body = () if c.body is None else tuple(comp.body(c.body))
        for h in comp.head(c.head):
            out.append(RuntimeClause(h, body))
    return out + comp.aux


def query_to_runtime(f, tag: str = "q") -> tuple:
    """Goals for a pipelined query plus auxiliary clauses it needs."""
    comp = _Compiler(tag + "or")
    goals = comp.body(f)
    return goals, comp.aux


# --------------------------------------------------------------- term text

def _quote(s: str) -> str:
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"


def const_symbol(t) -> str:
    """The quoted atom used for a constant in both text targets."""
    if isinstance(t, Local):
        return _quote(t.name)
    if isinstance(t, Iri):
        return _quote("<" + t.iri + ">")
    if isinstance(t, Literal):
        s = '"' + t.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if t.symspace != XS_STRING:
            s += "^^<" + t.symspace + ">"
        return _quote(s)
    raise TypeError(t)


def symbol_const(text: str):
    """Inverse of const_symbol on the unquoted atom text."""
    if text.startswith("<") and text.endswith(">"):
        return Iri(text[1:-1])
    if text.startswith('"'):
        m = re.fullmatch(r'"((?:[^"\\]|\\.)*)"(?:\^\^<(.*)>)?', text, re.S)
        if m:
            lex = re.sub(r"\\(.)", r"\1", m.group(1))
            return Literal(lex, m.group(2) or XS_STRING)
    return Local(text)


class _VarNames:
    def __init__(self):
        self.names = {}
        self.taken = set()

    def __call__(self, v: Var) -> str:
        if v in self.names:
            return self.names[v]
        base = re.sub(r"\W", "_", v.name, flags=re.ASCII)
        if not base or not base[0].isalpha():
            base = "V" + base
        base = base[0].upper() + base[1:]
        name, n = base, 1
        while name in self.taken:
            n += 1
            name = f"{base}_{n}"
        self.taken.add(name)
        self.names[v] = name
        return name


def _number_text(n: Number) -> str:
    return format(n.value, "f")


_ARITH = {FUNC_NS + "numeric-add": "+", FUNC_NS + "numeric-subtract": "-",
          FUNC_NS + "numeric-multiply": "*", FUNC_NS + "numeric-divide": "/",
          FUNC_NS + "numeric-integer-divide": "//", FUNC_NS + "numeric-mod": "mod"}
_COMPARE = {PRED_NS + "numeric-greater-than": ">", PRED_NS + "numeric-less-than": "<",
            PRED_NS + "numeric-greater-than-or-equal": ">=",
            PRED_NS + "numeric-less-than-or-equal": "=<",
            PRED_NS + "numeric-equal": "=:=", PRED_NS + "numeric-not-equal": "=\\="}
_ARITH_INV = {v: k for k, v in _ARITH.items()}
_COMPARE_INV = {v: k for k, v in _COMPARE.items()}


class PrologWriter:
    def __init__(self):
        self.vars = _VarNames()

    def term(self, t) -> str:
        if isinstance(t, Var):
            return self.vars(t)
        if isinstance(t, Number):
            return _number_text(t)
        if isinstance(t, Expr):
            if not t.args:
                raise ConversionError("zero-argument function application has no Prolog form")
            return self.fn(t.fn) + "(" + ",".join(self.term(a) for a in t.args) + ")"
        if isinstance(t, ExternalTerm):
            return self.arith(t)
        return const_symbol(t)

    def fn(self, t) -> str:
        if isinstance(t, (Local, Iri)):
            return const_symbol(t)
        raise ConversionError(f"function symbol must be a constant: {t!r}")

    def arith(self, t) -> str:
        if isinstance(t, ExternalTerm):
            e = t.expr
            if not isinstance(e, Expr) or not isinstance(e.fn, Iri) or e.fn.iri not in _ARITH:
                name = e.fn.iri if isinstance(e, Expr) and isinstance(e.fn, Iri) else repr(e)
                raise ConversionError(f"no Prolog mapping for built-in {name}")
            if len(e.args) != 2:
                raise ConversionError(f"built-in {e.fn.iri} expects two arguments")
            return "(" + self.arith(e.args[0]) + " " + _ARITH[e.fn.iri] + " " + self.arith(e.args[1]) + ")"
        return self.term(t)

    def atom(self, a: RuntimeAtom) -> str:
        if a.kind == EQUAL:
            left, right = a.args
            if isinstance(right, ExternalTerm) and not isinstance(left, ExternalTerm):
                return self.term(left) + " is " + self.arith(right)
            if isinstance(left, ExternalTerm) and not isinstance(right, ExternalTerm):
                return self.term(right) + " is " + self.arith(left)
            return self.term(left) + " = " + self.term(right)
        if a.kind == BUILTIN:
            if a.name not in _COMPARE:
                raise ConversionError(f"no Prolog mapping for built-in {a.name}")
            x, y = a.args
            return self.arith(x) + " " + _COMPARE[a.name] + " " + self.arith(y)
        if a.kind in RESERVED:
            name = a.kind
        elif a.kind == AUX:
            name = _quote("$aux_" + a.name)
        else:
            name = self.fn(a.name)
        if not a.args:
            return name
        return name + "(" + ",".join(self.term(x) for x in a.args) + ")"


def emit_prolog(clauses, prefixes=(), tabled: bool = False) -> str:
    """ISO Prolog text, one clause per line."""
    lines = []
    if tabled:
        seen = []
        for c in clauses:
            h = c.head
            name = h.kind if h.kind in RESERVED else (
                _quote("$aux_" + h.name) if h.kind == AUX else const_symbol(h.name))
            spec = f"{name}/{len(h.args)}"
            if spec not in seen:
                seen.append(spec)
        lines.extend(f":- table {s}." for s in seen)
    for c in clauses:
        w = PrologWriter()
        s = w.atom(c.head)
        if c.body:
            s += " :- " + ", ".join(w.atom(b) for b in c.body)
        lines.append(s + ".")
    return "".join(ln + "\n" for ln in lines)


# ----------------------------------------------------------- Prolog reader

_PL_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<qatom>'(?:[^'\\]|\\.)*')
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<var>[A-Z_]\w*)
  | (?P<atom>[a-z]\w*)
  | (?P<sym>:-|=\\=|=:=|>=|=<|//|[-+*/<>=(),.])
""", re.X)


class PrologSyntaxError(Exception):
    pass


class _PrologReader:
    _INFIX = {"=": 700, "is": 700, ">": 700, "<": 700, ">=": 700, "=<": 700,
              "=:=": 700, "=\\=": 700, "+": 500, "-": 500, "*": 400, "/": 400,
              "//": 400, "mod": 400}

    def __init__(self, text: str):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _PL_TOKEN.match(text, pos)
            if not m:
                line = text.count("\n", 0, pos) + 1
                raise PrologSyntaxError(f"line {line}: unexpected character {text[pos]!r}")
            pos = m.end()
            if m.lastgroup == "ws":
                continue
            kind, val = m.lastgroup, m.group()
            if kind == "atom" and val in ("is", "mod"):
                kind = "sym"
            if kind == "num" and self.toks and self.toks[-1] == ("sym", "-") and (
                    len(self.toks) < 2 or self.toks[-2][0] == "sym" and self.toks[-2][1] != ")"):
                self.toks.pop()
                val = "-" + val
            self.toks.append((kind, val))
        self.i = 0
        self.vars = {}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "")

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val):
        t = self.next()
        if t[1] != val:
            raise PrologSyntaxError(f"expected {val!r}, found {t[1]!r}")

    def clauses(self):
        out = []
        while self.peek()[0] != "eof":
            self.vars = {}
            if self.peek() == ("sym", ":-"):
                self.next()
                self.expr(1200)
                self.expect(".")
                continue
            head = self.expr(999)
            body = []
            if self.peek() == ("sym", ":-"):
                self.next()
                body.append(self.expr(999))
                while self.peek() == ("sym", ","):
                    self.next()
                    body.append(self.expr(999))
            self.expect(".")
            out.append((head, body))
        return out

    def expr(self, maxp):
        left = self.primary()
        while True:
            kind, val = self.peek()
            p = self._INFIX.get(val) if kind == "sym" else None
            if p is None or p > maxp:
                return left
            self.next()
            right = self.expr(p - 1 if p == 700 else p - 1)
            left = ("op", val, left, right)
            if p == 700:
                return left

    def primary(self):
        kind, val = self.next()
        if kind == "num":
            return ("num", val)
        if kind == "var":
            return ("var", val)
        if kind == "sym" and val == "(":
            e = self.expr(1200)
            self.expect(")")
            return e
        if kind == "sym" and val == "-" and self.peek()[0] in ("var", "sym"):
            return ("op", "-", ("num", "0"), self.primary())
        if kind in ("qatom", "atom") or (kind == "sym" and val == "table"):
            name = val[1:-1] if kind == "qatom" else val
            name = re.sub(r"\\(.)", r"\1", name) if kind == "qatom" else name
            args = []
            if self.peek() == ("sym", "("):
                self.next()
                args.append(self.expr(999))
                while self.peek() == ("sym", ","):
                    self.next()
                    args.append(self.expr(999))
                self.expect(")")
            return ("cmp", name, kind == "qatom", args)
        raise PrologSyntaxError(f"unexpected token {val!r}")


def _pl_term(t, vars_: dict):
    kind = t[0]
    if kind == "num":
        try:
            return Number(Decimal(t[1]))
        except InvalidOperation:
            raise PrologSyntaxError(f"bad number {t[1]!r}")
    if kind == "var":
        return vars_.setdefault(t[1], Var(t[1]))
    if kind == "op":
        if t[1] not in _ARITH_INV:
            raise PrologSyntaxError(f"operator {t[1]!r} in term position")
        return ExternalTerm(Expr(Iri(_ARITH_INV[t[1]]), (_pl_term(t[2], vars_), _pl_term(t[3], vars_))))
    _, name, quoted, args = t
    const = symbol_const(name)
    if not args:
        return const
    return Expr(const, tuple(_pl_term(a, vars_) for a in args))


def _pl_atom(t, vars_: dict) -> RuntimeAtom:
    if t[0] == "op":
        op, left, right = t[1], _pl_term(t[2], vars_), _pl_term(t[3], vars_)
        if op == "=":
            return RuntimeAtom(EQUAL, (left, right))
        if op == "is":
            return RuntimeAtom(EQUAL, (left, right))
        if op in _COMPARE_INV:
            return RuntimeAtom(BUILTIN, (left, right), _COMPARE_INV[op])
        raise PrologSyntaxError(f"operator {op!r} as a goal")
    if t[0] != "cmp":
        raise PrologSyntaxError("goal is not callable")
    _, name, quoted, args = t
    terms = tuple(_pl_term(a, vars_) for a in args)
    if not quoted and name in RESERVED:
        return RuntimeAtom(name, terms)
    if quoted and name.startswith("$aux_"):
        return RuntimeAtom(AUX, terms, name[5:])
    return RuntimeAtom(REL, terms, symbol_const(name))


def parse_prolog(text: str) -> list:
    """Read Prolog text in the emitted dialect back into RuntimeClauses.

    Variables come back under their Prolog names; `X is E` reads as an
    equation with an External arithmetic side."""
    r = _PrologReader(text)
    out = []
    for head, body in r.clauses():
        vars_ = {}
        h = _pl_atom(head, vars_)
        out.append(RuntimeClause(h, tuple(_pl_atom(b, vars_) for b in body)))
    return out


# -------------------------------------------------------------------- TPTP

class TptpWriter(PrologWriter):
    def term(self, t) -> str:
        if isinstance(t, ExternalTerm):
            raise ConversionError("arithmetic is outside the TPTP-FOF target")
        return super().term(t)

    def atom(self, a: RuntimeAtom) -> str:
        if a.kind == BUILTIN:
            raise ConversionError(f"arithmetic built-in {a.name} is outside the TPTP-FOF target")
        if a.kind == EQUAL:
            return self.term(a.args[0]) + " = " + self.term(a.args[1])
        return super().atom(a)


def _runtime_vars(atoms) -> list:
    out = []

    def walk(t):
        if isinstance(t, Var):
            if t not in out:
                out.append(t)
        elif isinstance(t, Expr):
            walk(t.fn)
            for x in t.args:
                walk(x)
        elif isinstance(t, ExternalTerm):
            walk(t.expr)
    for a in atoms:
        for x in a.args:
            walk(x)
    return out


def emit_tptp(clauses, prefixes=(), queries=()) -> str:
    """TPTP-FOF text: one axiom per clause, one conjecture per query.

    `queries` holds goal lists as produced by query_to_runtime."""
    lines = []
    for i, c in enumerate(clauses, 1):
        w = TptpWriter()
        vs = _runtime_vars((c.head,) + tuple(c.body))
        if c.body:
            body = " & ".join(w.atom(b) for b in c.body)
            f = f"({body} => {w.atom(c.head)})"
        else:
            f = w.atom(c.head)
        if vs:
            f = "![" + ",".join(w.vars(v) for v in vs) + "]: " + (f if f.startswith("(") else f"({f})")
        lines.append(f"fof(ax{i}, axiom, {f}).")
    for i, goals in enumerate(queries, 1):
        w = TptpWriter()
        vs = _runtime_vars(goals)
        f = " & ".join(w.atom(g) for g in goals) if goals else "$true"
        if vs:
            f = "?[" + ",".join(w.vars(v) for v in vs) + "]: (" + f + ")"
        lines.append(f"fof(q{i}, conjecture, {f}).")
    return "".join(ln + "\n" for ln in lines)
