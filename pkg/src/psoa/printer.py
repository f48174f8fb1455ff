"""Presentation-syntax printer and RuleML/XML serializer."""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from xml.dom import minidom

from .core import (KB, And, Atom, DefaultFact, Equal, Exists, Expr, External,
                   ExternalTerm, Iri, Literal, Local, Number, Or, Rule, Slot,
                   Subclass, Tuple, Var, XS_STRING)
from .parser import KEYWORDS, RIF_LOCAL, _NUM

_PLAIN_LOCAL = re.compile(r"[^\W\d_](?:[\w]|-(?![>\[])|\.(?=[\w\-]))*\Z")
_PN_LOCAL = re.compile(r"[\w](?:[\w]|-(?![>\[])|\.(?=[\w\-]))*\Z")


class Printer:
    def __init__(self, abridged: bool = True, prefixes=()):
        self.abridged = abridged
        # longest namespace first so the most specific prefix wins
        self.prefixes = sorted(prefixes, key=lambda p: -len(p[1]))

    def term(self, t) -> str:
        if isinstance(t, Local):
            n = t.name
            if self.abridged and _PLAIN_LOCAL.match(n) and n not in KEYWORDS and not _NUM.match(n):
                return n
            if not _PN_LOCAL.match("_" + n):
                return self.term(Literal(n, RIF_LOCAL))
            return "_" + n
        if isinstance(t, Var):
            return "?" + t.name
        if isinstance(t, Number):
            return format(t.value, "f")
        if isinstance(t, Iri):
            return self.iri(t.iri)
        if isinstance(t, Literal):
            s = '"' + t.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
            if t.symspace == XS_STRING:
                return s
            return s + "^^" + self.iri(t.symspace)
        if isinstance(t, Expr):
            return self.term(t.fn) + "(" + " ".join(self.term(a) for a in t.args) + ")"
        if isinstance(t, ExternalTerm):
            return "External(" + self.term(t.expr) + ")"
        if isinstance(t, Atom):
            return self.atom(t)
        raise TypeError(f"not a term: {t!r}")

    def iri(self, iri: str) -> str:
        for name, ns in self.prefixes:
            if iri.startswith(ns) and _PN_LOCAL.match(iri[len(ns):]):
                return f"{name}:{iri[len(ns):]}"
        return f"<{iri}>"

    def descs(self, descs) -> str:
        tuples = [d for d in descs if isinstance(d, Tuple)]
        slots = [d for d in descs if isinstance(d, Slot)]
        parts = []
        if len(tuples) == 1 and tuples[0].dep and tuples[0].terms:
            parts.extend(self.term(x) for x in tuples[0].terms)
        else:
            for d in tuples:
                parts.append(("+[" if d.dep else "-[") + " ".join(self.term(x) for x in d.terms) + "]")
        for d in slots:
            parts.append(self.term(d.name) + ("+>" if d.dep else "->") + self.term(d.filler))
        return " ".join(parts)

    def atom(self, a: Atom) -> str:
        s = self.term(a.pred)
        if a.oid is not None:
            s = self.term(a.oid) + "#" + s
            if not a.descs:
                return s
        return s + "(" + self.descs(a.descs) + ")"

    def formula(self, f) -> str:
        if isinstance(f, Atom):
            return self.atom(f)
        if isinstance(f, And):
            return "And(" + " ".join(self.formula(x) for x in f.items) + ")"
        if isinstance(f, Or):
            return "Or(" + " ".join(self.formula(x) for x in f.items) + ")"
        if isinstance(f, Exists):
            return "Exists " + " ".join(self.term(v) for v in f.vars) + " (" + self.formula(f.body) + ")"
        if isinstance(f, Equal):
            return self.term(f.left) + " = " + self.term(f.right)
        if isinstance(f, Subclass):
            return self.term(f.sub) + "##" + self.term(f.sup)
        if isinstance(f, External):
            return "External(" + self.atom(f.atom) + ")"
        raise TypeError(f"not a formula: {f!r}")

    def clause(self, c) -> str:
        if isinstance(c, DefaultFact):
            return self.term(c.pred) + "{" + self.descs(c.descs) + "}"
        s = self.formula(c.head)
        if c.body is not None:
            s += " :- " + self.formula(c.body)
        if c.vars:
            s = "Forall " + " ".join(self.term(v) for v in c.vars) + " (" + s + ")"
        return s

    def kb(self, kb: KB) -> str:
        lines = []
        if kb.base is not None:
            lines.append(f"Base(<{kb.base}>)")
        for name, iri in kb.prefixes:
            lines.append(f"Prefix({name}: <{iri}>)")
        for iri, profile in kb.imports:
            lines.append(f"Import(<{iri}>" + (f" <{profile}>" if profile else "") + ")")
        if self.abridged:
            lines.extend(self.clause(c) for c in kb.asserts)
            lines.extend("Query(" + self.formula(q) + ")" for q in kb.queries)
            return "\n".join(lines) + ("\n" if lines else "")
        body = ["  " + ln for ln in lines]
        body.append("  Assert(")
        body.extend("    " + self.clause(c) for c in kb.asserts)
        body.append("  )")
        body.extend("  Query(" + self.formula(q) + ")" for q in kb.queries)
        return "RuleML(\n" + "\n".join(body) + "\n)\n"


def print_presentation(kb: KB, mode: str = "abridged") -> str:
    """Render a KB in presentation syntax ("abridged" or "unabridged")."""
    if mode not in ("abridged", "unabridged"):
        raise ValueError(f"unknown mode {mode!r}")
    return Printer(mode == "abridged", kb.prefixes).kb(kb)


def print_formula(f, abridged: bool = True, prefixes=()) -> str:
    return Printer(abridged, prefixes).formula(f)


def print_term(t, abridged: bool = True, prefixes=()) -> str:
    return Printer(abridged, prefixes).term(t)


def print_clause(c, abridged: bool = True, prefixes=()) -> str:
    return Printer(abridged, prefixes).clause(c)


# ----------------------------------------------------------------------- XML

RULEML_NS = "http://ruleml.org/spec"


def _text_el(tag: str, text: str, **attrs) -> ET.Element:
    e = ET.Element(tag, attrs)
    e.text = text
    return e


def _xml_term(t) -> ET.Element:
    if isinstance(t, Local):
        return _text_el("Ind", t.name)
    if isinstance(t, Number):
        return _text_el("Ind", format(t.value, "f"))
    if isinstance(t, Iri):
        return ET.Element("Ind", {"iri": t.iri})
    if isinstance(t, Literal):
        if t.symspace == XS_STRING:
            return _text_el("Data", t.lexical)
        return _text_el("Data", t.lexical, type=t.symspace)
    if isinstance(t, Var):
        return _text_el("Var", t.name)
    if isinstance(t, Expr):
        e = ET.Element("Expr")
        op = ET.SubElement(e, "op")
        op.append(_xml_fun(t.fn))
        for a in t.args:
            ET.SubElement(e, "arg").append(_xml_term(a))
        return e
    if isinstance(t, ExternalTerm):
        e = ET.Element("External")
        ET.SubElement(e, "content").append(_xml_term(t.expr))
        return e
    if isinstance(t, Atom):
        return xml_atom(t)
    raise TypeError(f"not a term: {t!r}")


def _xml_fun(t) -> ET.Element:
    if isinstance(t, Local):
        return _text_el("Fun", t.name)
    if isinstance(t, Iri):
        return ET.Element("Fun", {"iri": t.iri})
    return _xml_term(t)


def _xml_rel(t) -> ET.Element:
    if isinstance(t, Local):
        return _text_el("Rel", t.name)
    if isinstance(t, Iri):
        return ET.Element("Rel", {"iri": t.iri})
    return _xml_term(t)


def xml_atom(a: Atom) -> ET.Element:
    """Serialize one atom, descriptors in canonical bag order."""
    e = ET.Element("Atom")
    if a.oid is not None:
        ET.SubElement(e, "oid").append(_xml_term(a.oid))
    ET.SubElement(e, "op").append(_xml_rel(a.pred))
    order = ((Tuple, True, "tupdep"), (Tuple, False, "tup"),
             (Slot, True, "slotdep"), (Slot, False, "slot"))
    for cls, dep, tag in order:
        for d in a.descs:
            if isinstance(d, cls) and d.dep == dep:
                edge = ET.SubElement(e, tag)
                if cls is Tuple:
                    tup = ET.SubElement(edge, "Tuple")
                    for x in d.terms:
                        tup.append(_xml_term(x))
                else:
                    edge.append(_xml_term(d.name))
                    edge.append(_xml_term(d.filler))
    return e


def _xml_formula(f) -> ET.Element:
    if isinstance(f, Atom):
        return xml_atom(f)
    if isinstance(f, (And, Or)):
        e = ET.Element(type(f).__name__)
        for x in f.items:
            ET.SubElement(e, "formula").append(_xml_formula(x))
        return e
    if isinstance(f, Exists):
        e = ET.Element("Exists")
        for v in f.vars:
            ET.SubElement(e, "declare").append(_xml_term(v))
        ET.SubElement(e, "formula").append(_xml_formula(f.body))
        return e
    if isinstance(f, Equal):
        e = ET.Element("Equal")
        ET.SubElement(e, "left").append(_xml_term(f.left))
        ET.SubElement(e, "right").append(_xml_term(f.right))
        return e
    if isinstance(f, Subclass):
        e = ET.Element("Subclass")
        ET.SubElement(e, "sub").append(_xml_rel(f.sub))
        ET.SubElement(e, "super").append(_xml_rel(f.sup))
        return e
    if isinstance(f, External):
        e = ET.Element("External")
        ET.SubElement(e, "content").append(xml_atom(f.atom))
        return e
    raise TypeError(f"not a formula: {f!r}")


def _xml_clause(c) -> ET.Element:
    if isinstance(c, DefaultFact):
        # written out as the rule it abbreviates is left to the transform;
        # here it keeps its own element
        e = ET.Element("DefaultAtom")
        e.append(xml_atom(Atom(c.pred, c.descs)))
        return e
    if c.body is None:
        inner = _xml_formula(c.head)
    else:
        inner = ET.Element("Implies")
        ET.SubElement(inner, "if").append(_xml_formula(c.body))
        ET.SubElement(inner, "then").append(_xml_formula(c.head))
    if not c.vars:
        return inner
    e = ET.Element("Forall")
    for v in c.vars:
        ET.SubElement(e, "declare").append(_xml_term(v))
    ET.SubElement(e, "formula").append(inner)
    return e


def emit_xml(kb: KB) -> str:
    """Serialize a KB as striped RuleML/XML."""
    root = ET.Element("RuleML", {"xmlns": RULEML_NS})
    if kb.asserts:
        act = ET.SubElement(root, "act", {"index": "1"})
        a = ET.SubElement(act, "Assert")
        for c in kb.asserts:
            ET.SubElement(a, "formula").append(_xml_clause(c))
    for i, q in enumerate(kb.queries, start=2 if kb.asserts else 1):
        act = ET.SubElement(root, "act", {"index": str(i)})
        qe = ET.SubElement(act, "Query")
        ET.SubElement(qe, "formula").append(_xml_formula(q))
    raw = ET.tostring(root, encoding="unicode")
    return minidom.parseString(raw).toprettyxml(indent="  ")


def atom_to_xml(a: Atom, pretty: bool = True) -> str:
    raw = ET.tostring(xml_atom(a), encoding="unicode")
    if not pretty:
        return raw
    return minidom.parseString(raw).toprettyxml(indent="  ").split("\n", 1)[1]
