"""Recursive-descent parser for the PSOA presentation syntax.

Accepts both the unabridged form (RuleML/Assert wrappers, `_`-prefixed
locals) and the abridged form (bare clauses, unprefixed locals).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from .core import (KB, And, Atom, DefaultFact, Equal, Exists, Expr, External,
                   ExternalTerm, Iri, Literal, Local, Number, Or, Rule, Slot,
                   Subclass, Tuple, Var, XS_STRING, free_vars, rule_free_vars)

log = logging.getLogger(__name__)

RIF_LOCAL = "http://www.w3.org/2007/rif#local"
RIF_IRI = "http://www.w3.org/2007/rif#iri"

KEYWORDS = {"RuleML", "Base", "Prefix", "Import", "Assert", "Query",
            "Forall", "Exists", "And", "Or", "External"}


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        super().__init__(str(diag))
        self.diagnostic = diag


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


_NAME = r"[\w](?:[\w]|-(?![>\[])|\.(?=[\w\-]))*"
_NUM = re.compile(r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<iri><[^<>"\s]*>)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>\#\#|\#|:-|\+>|->|\+\[|-\[|\^\^|[()\[\]{}=])
  | (?P<var>\?(?:""" + _NAME + r""")?)
  | (?P<signed>[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?(?![\w]|-(?![>\[])|\.(?=[\w\-])))
  | (?P<curie>(?:""" + _NAME + r""")?:(?:""" + _NAME + r"""))
  | (?P<ns>(?:""" + _NAME + r""")?:)
  | (?P<name>""" + _NAME + r""")
""", re.X)


def tokenize(src: str) -> list:
    toks = []
    i, n = 0, len(src)
    while i < n:
        m = _TOKEN.match(src, i)
        if not m:
            raise ParseError(_diag(src, i, f"unexpected character {src[i]!r}"))
        kind = m.lastgroup
        text = m.group()
        if kind == "ns" and src.startswith(":-", m.start() + len(text) - 1):
            # `a:-b` is a name followed by the implication arrow
            m2 = re.compile(_NAME).match(src, i)
            if m2 and m2.end() == m.end() - 1:
                toks.append(Tok("name", m2.group(), i))
                i = m2.end()
                continue
        if kind != "ws":
            if kind == "signed":
                kind = "num"
            elif kind == "name" and _NUM.match(text):
                kind = "num"
            toks.append(Tok(kind, text, i))
        i = m.end()
    toks.append(Tok("eof", "", n))
    return toks


def _diag(src: str, pos: int, msg: str, severity: str = "error") -> ParseDiagnostic:
    line = src.count("\n", 0, pos) + 1
    col = pos - (src.rfind("\n", 0, pos) + 1) + 1
    return ParseDiagnostic(line, col, msg, severity)


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s)


class Parser:
    def __init__(self, src: str, prefixes: Optional[dict] = None, diagnostics: Optional[list] = None):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.prefixes = dict(prefixes or {})
        self.prefix_order = list(self.prefixes.items())
        self.diagnostics = diagnostics if diagnostics is not None else []
        self.anon = 0

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Tok] = None):
        raise ParseError(_diag(self.src, (tok or self.tok).pos, msg))

    def warn(self, msg: str, tok: Optional[Tok] = None):
        d = _diag(self.src, (tok or self.tok).pos, msg, "warning")
        self.diagnostics.append(d)
        log.warning("%s", d)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind == "punct" and t.text == text

    def at_kw(self, kw: str) -> bool:
        t = self.tok
        return t.kind == "name" and t.text == kw

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def expect_kw(self, kw: str):
        if not self.at_kw(kw):
            self.error(f"expected {kw}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def kw_call(self, kw: str) -> bool:
        return self.at_kw(kw) and self.peek().kind == "punct" and self.peek().text == "("

    # -- documents
    def document(self, mode: str = "auto") -> KB:
        if mode == "auto":
            mode = "unabridged" if self.kw_call("RuleML") else "abridged"
        asserts, queries, imports = [], [], []
        base = None
        if mode == "unabridged":
            self.expect_kw("RuleML")
            self.expect("(")
            if self.kw_call("Base"):
                base = self.base()
            while self.kw_call("Prefix"):
                self.prefix_decl()
            while self.kw_call("Import"):
                imports.append(self.import_decl())
            while not self.at(")"):
                if self.kw_call("Assert"):
                    asserts.extend(self.assert_block(nested=False))
                elif self.kw_call("Query"):
                    queries.append(self.query_decl())
                else:
                    self.error("expected Assert or Query")
            self.expect(")")
        else:
            while self.tok.kind != "eof":
                if self.kw_call("Base"):
                    base = self.base()
                elif self.kw_call("Prefix"):
                    self.prefix_decl()
                elif self.kw_call("Import"):
                    imports.append(self.import_decl())
                elif self.kw_call("Assert"):
                    asserts.extend(self.assert_block(nested=False))
                elif self.kw_call("Query"):
                    queries.append(self.query_decl())
                else:
                    asserts.append(self.rule())
        if self.tok.kind != "eof":
            self.error("trailing input after document")
        return KB(tuple(asserts), tuple(queries), tuple(self.prefix_order), tuple(imports), base)

    def base(self) -> str:
        self.expect_kw("Base")
        self.expect("(")
        iri = self.iri_token()
        self.expect(")")
        return iri

    def iri_token(self) -> str:
        if self.tok.kind != "iri":
            self.error("expected <IRI>")
        t = self.tok.text[1:-1]
        self.i += 1
        return t

    def prefix_decl(self):
        self.expect_kw("Prefix")
        self.expect("(")
        t = self.tok
        if t.kind != "ns":
            self.error("expected prefix name like `pred:`")
        self.i += 1
        name = t.text[:-1]
        iri = self.iri_token()
        self.expect(")")
        if name in self.prefixes and self.prefixes[name] != iri:
            self.error(f"prefix {name!r} declared twice", t)
        if name not in self.prefixes:
            self.prefix_order.append((name, iri))
        self.prefixes[name] = iri

    def import_decl(self) -> tuple:
        self.expect_kw("Import")
        self.expect("(")
        iri = self.iri_token()
        profile = None
        if self.tok.kind == "iri":
            profile = self.iri_token()
            self.warn("Import profile has no defined effect; ignored")
        self.expect(")")
        return (iri, profile)

    def assert_block(self, nested: bool) -> list:
        t = self.tok
        self.expect_kw("Assert")
        if nested:
            self.warn("nested Assert flattened", t)
        self.expect("(")
        out = []
        while not self.at(")"):
            if self.kw_call("Assert"):
                out.extend(self.assert_block(nested=True))
            else:
                out.append(self.rule())
        self.expect(")")
        return out

    def query_decl(self):
        self.expect_kw("Query")
        self.expect("(")
        f = self.formula()
        self.expect(")")
        return f

    # -- rules
    def rule(self):
        start = self.tok
        if self.at_kw("Forall") and self.peek().kind == "var":
            self.i += 1
            vs = []
            while self.tok.kind == "var":
                vs.append(self.var())
            self.expect("(")
            r = self.clause()
            self.expect(")")
            if isinstance(r, DefaultFact):
                self.error("default facts take no Forall", start)
            # anonymous variables are quantified where they occur
            anon = [v for v in rule_free_vars(r) if v.name.startswith("_anon")]
            r = Rule(r.head, r.body, tuple(dict.fromkeys(vs + anon)))
            missing = [v for v in rule_free_vars(r) if v not in r.vars]
            if missing:
                self.error("variables not bound by Forall: " + " ".join("?" + v.name for v in missing), start)
            return r
        r = self.clause()
        if isinstance(r, Rule):
            fv = rule_free_vars(r)
            if fv:
                self.warn("free variables implicitly universally closed: "
                          + " ".join("?" + v.name for v in fv), start)
                r = Rule(r.head, r.body, tuple(fv))
        return r

    def clause(self):
        head = self.head()
        if isinstance(head, DefaultFact):
            return head
        if self.at(":-"):
            self.i += 1
            body = self.formula()
            return Rule(head, body)
        return Rule(head)

    def head(self):
        if self.kw_call("And"):
            self.i += 2
            items = []
            while not self.at(")"):
                items.append(self.head())
            self.expect(")")
            return And(tuple(items))
        if self.at_kw("Exists") and self.peek().kind == "var":
            self.i += 1
            vs = self.var_list()
            self.expect("(")
            h = self.head()
            self.expect(")")
            return Exists(vs, h)
        return self.atomic(allow_default=True)

    def var_list(self) -> tuple:
        vs = []
        while self.tok.kind == "var":
            vs.append(self.var())
        return tuple(dict.fromkeys(vs))

    # -- formulas
    def formula(self):
        if self.kw_call("And") or self.kw_call("Or"):
            cls = And if self.tok.text == "And" else Or
            self.i += 2
            items = []
            while not self.at(")"):
                items.append(self.formula())
            self.expect(")")
            return cls(tuple(items))
        if self.at_kw("Exists") and self.peek().kind == "var":
            self.i += 1
            vs = self.var_list()
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return Exists(vs, f)
        if self.kw_call("External"):
            self.i += 2
            t = self.tok
            a = self.atomic()
            if not isinstance(a, Atom) or a.oid is not None:
                self.error("External expects an oidless atom", t)
            self.expect(")")
            return External(a)
        return self.atomic()

    def atomic(self, allow_default: bool = False):
        start = self.tok
        t = self.primary()
        if self.at("#"):
            t = self.oidful(t)
        elif self.at("("):
            self.i += 1
            t = Atom(t, self.descriptors(")"))
        elif self.at("{"):
            if not allow_default:
                self.error("default fact not allowed here")
            self.i += 1
            descs = self.descriptors("}")
            if not descs:
                self.error("default fact needs at least one descriptor", start)
            return DefaultFact(t, descs)
        if self.at("##"):
            self.i += 1
            return Subclass(t, self.term())
        if self.at("="):
            self.i += 1
            return Equal(t, self.term())
        if not isinstance(t, Atom):
            self.error("expected an atom, equality or subclass formula", start)
        return t

    def oidful(self, oid) -> Atom:
        self.expect("#")
        pred = self.primary()
        if self.at("("):
            self.i += 1
            return Atom(pred, self.descriptors(")"), oid)
        return Atom(pred, (), oid)

    def descriptors(self, close: str) -> tuple:
        positional, tuples, slots = [], [], []
        while not self.at(close):
            t0 = self.tok
            if self.at("+[") or self.at("-["):
                dep = self.tok.text[0] == "+"
                self.i += 1
                terms = []
                while not self.at("]"):
                    terms.append(self.term())
                self.expect("]")
                if positional:
                    self.error("bracketed tuple mixed with a non-bracketed one", t0)
                if slots:
                    self.error("tuples must precede slots", t0)
                tuples.append(Tuple(tuple(terms), dep))
                continue
            t = self.term()
            if self.at("+>") or self.at("->"):
                dep = self.tok.text[0] == "+"
                self.i += 1
                slots.append(Slot(t, self.term(), dep))
                continue
            if tuples:
                self.error("bracketed tuple mixed with a non-bracketed one", t0)
            if slots:
                self.error("tuple elements must precede slots", t0)
            positional.append(t)
        self.expect(close)
        if positional:
            tuples = [Tuple(tuple(positional), True)]
        return tuple(tuples) + tuple(slots)

    # -- terms
    def term(self):
        t = self.primary()
        if self.at("#"):
            return self.oidful(t)
        if self.at("("):
            start = self.tok
            self.i += 1
            args = []
            if self.at("+["):
                # f(+[a b]) is the bracketed spelling of f(a b)
                self.i += 1
                while not self.at("]"):
                    args.append(self.term())
                self.expect("]")
                if not self.at(")"):
                    self.error("an expression takes a single dependent tuple", start)
            while not self.at(")"):
                if self.at("+[") or self.at("-["):
                    self.error("an expression takes a single dependent tuple", start)
                a = self.term()
                if self.at("+>") or self.at("->"):
                    self.error("slots are not supported in expressions", start)
                args.append(a)
            self.expect(")")
            return Expr(t, tuple(args))
        return t

    def primary(self):
        t = self.tok
        if t.kind == "var":
            return self.var()
        if self.kw_call("External"):
            self.i += 2
            start = self.tok
            e = self.term()
            if not isinstance(e, Expr):
                self.error("External expects a function expression", start)
            self.expect(")")
            return ExternalTerm(e)
        if t.kind == "name":
            if t.text in KEYWORDS and self.peek().kind == "punct" and self.peek().text == "(":
                self.error(f"keyword {t.text} not allowed here")
            self.i += 1
            return Local(t.text[1:] if t.text.startswith("_") else t.text)
        if t.kind == "num":
            self.i += 1
            return Number(Decimal(t.text))
        if t.kind == "iri":
            self.i += 1
            return Iri(t.text[1:-1])
        if t.kind == "curie":
            self.i += 1
            return Iri(self.expand(t))
        if t.kind == "string":
            self.i += 1
            lex = _unescape(t.text[1:-1])
            if self.at("^^"):
                self.i += 1
                s = self.tok
                if s.kind == "iri":
                    sym = s.text[1:-1]
                elif s.kind == "curie":
                    sym = self.expand(s)
                else:
                    self.error("expected symbol space after ^^")
                self.i += 1
                if sym == RIF_LOCAL:
                    return Local(lex)
                if sym == RIF_IRI:
                    return Iri(lex)
                return Literal(lex, sym)
            return Literal(lex, XS_STRING)
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def expand(self, t: Tok) -> str:
        pre, local = t.text.split(":", 1)
        if pre not in self.prefixes:
            self.error(f"unbound prefix {pre + ':'!r}", t)
        return self.prefixes[pre] + local

    def var(self) -> Var:
        t = self.tok
        self.i += 1
        name = t.text[1:]
        if not name:
            self.anon += 1
            name = f"_anon{self.anon}"
        return Var(name)


def parse_kb(source: str, mode: str = "auto", diagnostics: Optional[list] = None,
             prefixes: Optional[dict] = None) -> KB:
    """Parse a KB document. `mode` is "auto", "unabridged" or "abridged".

    Warnings are appended to `diagnostics` when given; errors raise ParseError.
    """
    if mode not in ("auto", "unabridged", "abridged"):
        raise ValueError(f"unknown mode {mode!r}")
    return Parser(source, prefixes, diagnostics).document(mode)


def parse_query(source: str, prefixes: Optional[dict] = None, diagnostics: Optional[list] = None):
    """Parse a query formula, bare or wrapped in Query(...)."""
    p = Parser(source, prefixes, diagnostics)
    f = p.query_decl() if p.kw_call("Query") else p.formula()
    if p.tok.kind != "eof":
        p.error("trailing input after query")
    return f


def query_vars(f) -> list:
    """Answer variables of a query, in first-occurrence order."""
    return free_vars(f)
