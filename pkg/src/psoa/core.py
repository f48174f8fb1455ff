"""Data model for PSOA knowledge bases.

Terms, psoa atoms with four descriptor bags, the condition/rule formula
algebra, and the document wrapper. All values are frozen dataclasses so they
can be hashed, compared structurally and shared freely.

Also hosts the small descriptor algebra (reversal, canonical ordering) and the
atom metamodel classifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Optional, Union

XS_STRING = "http://www.w3.org/2001/XMLSchema#string"


@dataclass(frozen=True)
class Local:
    """Local constant; `_x` and `x` in source both map to Local("x")."""

    name: str


@dataclass(frozen=True)
class Iri:
    iri: str


@dataclass(frozen=True)
class Literal:
    lexical: str
    symspace: str = XS_STRING


@dataclass(frozen=True)
class Number:
    value: Decimal

    def __post_init__(self):
        if not isinstance(self.value, Decimal):
            object.__setattr__(self, "value", Decimal(str(self.value)))

    def __eq__(self, other):
        return isinstance(other, Number) and self.value == other.value

    def __hash__(self):
        return hash(("num", self.value))


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Expr:
    """Function application in term position, e.g. f(a b)."""

    fn: "Term"
    args: tuple = ()


@dataclass(frozen=True)
class ExternalTerm:
    """Built-in function call in term position: External(func:...(...))."""

    expr: Expr


Const = Union[Local, Iri, Literal, Number]

TOP = Local("Top")
PROP = Local("prop")


@dataclass(frozen=True)
class Tuple:
    terms: tuple
    dep: bool = True


@dataclass(frozen=True)
class Slot:
    name: "Term"
    filler: "Term"
    dep: bool = True


Descriptor = Union[Tuple, Slot]


@dataclass(frozen=True)
class Atom:
    pred: "Term"
    descs: tuple = ()
    oid: Optional["Term"] = None

    @property
    def is_empty(self) -> bool:
        return not self.descs


Term = Union[Local, Iri, Literal, Number, Var, Expr, ExternalTerm, Atom]


@dataclass(frozen=True)
class And:
    items: tuple = ()


@dataclass(frozen=True)
class Or:
    items: tuple = ()


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Equal:
    left: Term
    right: Term


@dataclass(frozen=True)
class Subclass:
    sub: Term
    sup: Term


@dataclass(frozen=True)
class External:
    """Built-in predicate call at formula level."""

    atom: Atom


Formula = Union[And, Or, Exists, Equal, Subclass, External, Atom]


@dataclass(frozen=True)
class Rule:
    """A clause. `body` is None for facts; `vars` are the Forall variables."""

    head: Formula
    body: Optional[Formula] = None
    vars: tuple = ()

    @property
    def is_fact(self) -> bool:
        return self.body is None


@dataclass(frozen=True)
class DefaultFact:
    pred: Term
    descs: tuple


@dataclass(frozen=True)
class KB:
    asserts: tuple = ()
    queries: tuple = ()
    prefixes: tuple = ()
    imports: tuple = ()
    base: Optional[str] = None

    def prefix_map(self) -> dict:
        return dict(self.prefixes)

    def replace(self, **kw) -> "KB":
        d = dict(asserts=self.asserts, queries=self.queries,
                 prefixes=self.prefixes, imports=self.imports, base=self.base)
        d.update(kw)
        return KB(**d)


# ---------------------------------------------------------------- traversal

def term_vars(t, acc: Optional[list] = None) -> list:
    """Variables of a term in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, Expr):
        term_vars(t.fn, acc)
        for a in t.args:
            term_vars(a, acc)
    elif isinstance(t, ExternalTerm):
        term_vars(t.expr, acc)
    elif isinstance(t, Atom):
        atom_vars(t, acc)
    return acc


def atom_vars(a: Atom, acc: Optional[list] = None) -> list:
    if acc is None:
        acc = []
    if a.oid is not None:
        term_vars(a.oid, acc)
    term_vars(a.pred, acc)
    for d in a.descs:
        if isinstance(d, Tuple):
            for t in d.terms:
                term_vars(t, acc)
        else:
            term_vars(d.name, acc)
            term_vars(d.filler, acc)
    return acc


def free_vars(f, acc: Optional[list] = None, bound: frozenset = frozenset()) -> list:
    """Free variables of a formula in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(f, (And, Or)):
        for x in f.items:
            free_vars(x, acc, bound)
    elif isinstance(f, Exists):
        free_vars(f.body, acc, bound | frozenset(f.vars))
    elif isinstance(f, Equal):
        for v in term_vars(f.left) + term_vars(f.right):
            if v not in bound and v not in acc:
                acc.append(v)
    elif isinstance(f, Subclass):
        for v in term_vars(f.sub) + term_vars(f.sup):
            if v not in bound and v not in acc:
                acc.append(v)
    elif isinstance(f, External):
        for v in atom_vars(f.atom):
            if v not in bound and v not in acc:
                acc.append(v)
    elif isinstance(f, Atom):
        for v in atom_vars(f):
            if v not in bound and v not in acc:
                acc.append(v)
    return acc


def rule_free_vars(r: Rule) -> list:
    acc = free_vars(r.head)
    if r.body is not None:
        free_vars(r.body, acc)
    return acc


def iter_atoms(f) -> Iterator[Atom]:
    """Atoms at formula level (not inside External, not nested as terms)."""
    if isinstance(f, (And, Or)):
        for x in f.items:
            yield from iter_atoms(x)
    elif isinstance(f, Exists):
        yield from iter_atoms(f.body)
    elif isinstance(f, Atom):
        yield f


def is_ground(t) -> bool:
    return not term_vars(t)


# ------------------------------------------------------- descriptor algebra

def reverse_descriptor(d: Descriptor) -> Descriptor:
    """Flip a descriptor between dependent and independent."""
    if isinstance(d, Tuple):
        return Tuple(d.terms, not d.dep)
    return Slot(d.name, d.filler, not d.dep)


def _bag(d: Descriptor) -> int:
    if isinstance(d, Tuple):
        return 0 if d.dep else 1
    return 2 if d.dep else 3


def canonicalize(atom: Atom) -> Atom:
    """Order descriptors as dependent tuples, independent tuples, dependent
    slots, independent slots; stable within each bag."""
    descs = tuple(sorted(atom.descs, key=_bag))
    if descs == atom.descs:
        return atom
    return Atom(atom.pred, descs, atom.oid)


def revert_top_dependents(atom: Atom) -> Atom:
    """Descriptors that depend on Top are the same as independent ones."""
    if atom.pred != TOP or not any(d.dep for d in atom.descs):
        return atom
    descs = tuple(reverse_descriptor(d) if d.dep else d for d in atom.descs)
    return Atom(atom.pred, descs, atom.oid)


def bag_counts(atom: Atom) -> tuple:
    """(m+, m-, k+, k-)."""
    c = [0, 0, 0, 0]
    for d in atom.descs:
        c[(0 if isinstance(d, Tuple) else 2) + (0 if d.dep else 1)] += 1
    return tuple(c)


def bag_equal(a: Atom, b: Atom) -> bool:
    """Structural equality treating each descriptor bag as a multiset."""
    if a.oid != b.oid or a.pred != b.pred:
        return False
    from collections import Counter
    return Counter(a.descs) == Counter(b.descs)


# ---------------------------------------------------------------- metamodel

@dataclass(frozen=True)
class AtomCategory:
    m: int
    k: int
    d1: str          # "oidless" | "oidful"
    d2: str          # "descriptorless" | "tupled" | "slotted" | "tupled+slotted"
    d3: str          # "n/a" | "perspeneutral" | "perspectival" | "perspeneutral+perspectival"
    label: Optional[str] = None
    name: Optional[str] = None
    counts: tuple = field(default=(0, 0, 0, 0))

    def __str__(self):
        s = f"D0(m={self.m},k={self.k}) {self.d1} {self.d2} {self.d3}"
        if self.label:
            s += f" {self.label}"
        if self.name:
            s += f" ({self.name})"
        return s


_LAYER = {"perspeneutral": "pn", "perspectival": "pv",
          "perspeneutral+perspectival": "pp"}


def classify_atom(atom: Atom) -> AtomCategory:
    """Place an atom in the D0-D3 metamodel."""
    mp, mm, kp, km = bag_counts(atom)
    m, k = mp + mm, kp + km
    d1 = "oidful" if atom.oid is not None else "oidless"
    if m == 0 and k == 0:
        name = "membership" if atom.oid is not None else None
        return AtomCategory(0, 0, d1, "descriptorless", "n/a", None, name, (0, 0, 0, 0))
    d2 = "tupled" if k == 0 else "slotted" if m == 0 else "tupled+slotted"
    dep, indep = mp + kp, mm + km
    if dep and indep:
        d3 = "perspeneutral+perspectival"
    elif dep:
        d3 = "perspectival"
    else:
        d3 = "perspeneutral"
    digit = {"tupled": 1, "slotted": 3, "tupled+slotted": 5}[d2] + (1 if atom.oid is not None else 0)
    label = f"{_LAYER[d3]}{digit}"
    name = None
    if label == "pn2" and m == 1:
        name = "shelf"
    elif label == "pn4":
        name = "frame"
    elif label == "pn6" and m == 1:
        name = "shelframe"
    elif label == "pv1" and m == 1:
        name = "relationship"
    elif label == "pv3":
        name = "pairship"
    elif label == "pv5" and m == 1:
        name = "relpairship"
    return AtomCategory(m, k, d1, d2, d3, label, name, (mp, mm, kp, km))
