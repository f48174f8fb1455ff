"""Random knowledge-base generators for the property tests."""

import random
from decimal import Decimal

from psoa.core import (KB, And, Atom, DefaultFact, Equal, Exists, Expr, External, Iri,
                       Literal, Local, Number, Or, Rule, Slot, Subclass, Tuple, Var, free_vars)

EX = "http://example.org/kb#"
PRED_BUILTIN = "http://www.w3.org/2007/rif-builtin-predicate#"

PREDS = ["p", "q", "r", "Teacher", "Student", "Top"]
CONSTS = ["a", "b", "c", "John", "Wed"]
SLOT_NAMES = ["dept", "gender", "age", "s1"]
VARS = ["x", "y", "z", "o"]


class FuzzKB:
    """Grammar-directed random KB; one instance per seed."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def const(self):
        r = self.rng.random()
        if r < 0.6:
            return Local(self.rng.choice(CONSTS))
        if r < 0.75:
            return Number(Decimal(self.rng.choice(["0", "7", "29400", "-3", "2.5"])))
        if r < 0.85:
            return Literal(self.rng.choice(["hi", "a b", "x\"y"]))
        if r < 0.92:
            return Literal("12", "http://www.w3.org/2001/XMLSchema#integer")
        return Iri(EX + self.rng.choice(CONSTS))

    def term(self, vars_ok: bool, depth: int = 0):
        r = self.rng.random()
        if vars_ok and r < 0.35:
            return Var(self.rng.choice(VARS))
        if depth < 1 and r > 0.9:
            n = self.rng.randint(0, 2)
            return Expr(Local("f"), tuple(self.term(vars_ok, depth + 1) for _ in range(n)))
        return self.const()

    def descs(self, vars_ok: bool, allow_dep=True):
        # tuples precede slots, as the grammar writes them
        out = []
        for _ in range(self.rng.randint(0, 2)):
            n = self.rng.randint(0, 3)
            dep = allow_dep and self.rng.random() < 0.5
            out.append(Tuple(tuple(self.term(vars_ok) for _ in range(n)), dep))
        for _ in range(self.rng.randint(0, 3)):
            dep = allow_dep and self.rng.random() < 0.5
            out.append(Slot(Local(self.rng.choice(SLOT_NAMES)), self.term(vars_ok), dep))
        return tuple(out)

    def atom(self, vars_ok: bool, oidless_ok: bool = True):
        pred = Local(self.rng.choice(PREDS))
        if oidless_ok and pred != Local("Top") and self.rng.random() < 0.35:
            n = self.rng.randint(0, 3)
            return Atom(pred, (Tuple(tuple(self.term(vars_ok) for _ in range(n))),))
        oid = self.term(vars_ok) if self.rng.random() < 0.8 else Local("John")
        if isinstance(oid, Expr):
            oid = Local("John")
        return Atom(pred, self.descs(vars_ok), oid)

    def condition(self, depth: int = 0):
        r = self.rng.random()
        if depth < 2 and r < 0.25:
            return And(tuple(self.condition(depth + 1) for _ in range(self.rng.randint(2, 3))))
        if depth < 2 and r < 0.32:
            return Or(tuple(self.condition(depth + 1) for _ in range(2)))
        if depth < 2 and r < 0.38:
            v = Var("e")
            return Exists((v,), Atom(Local("q"), (Tuple((v, self.term(True))),)))
        if r < 0.45:
            return Equal(Var(self.rng.choice(VARS)), self.term(True))
        if r < 0.5:
            cmp = self.rng.choice(["numeric-greater-than", "numeric-less-than"])
            return External(Atom(Iri(PRED_BUILTIN + cmp),
                                 (Tuple((Var(self.rng.choice(VARS)), Number(Decimal(3)))),)))
        return self.atom(True)

    def clause(self):
        r = self.rng.random()
        if r < 0.08:
            a, b = self.rng.sample(["p", "q", "r", "Teacher", "Student"], 2)
            return Rule(Subclass(Local(a), Local(b)))
        if r < 0.14:
            descs = self.descs(False) or (Slot(Local("s1"), Local("a"), False),)
            return DefaultFact(Local(self.rng.choice(PREDS[:-1])), descs)
        if r < 0.55:
            return Rule(self.atom(False))
        head = self.atom(True)
        if self.rng.random() < 0.2:
            head = And((head, self.atom(True)))
        body = self.condition()
        rule = Rule(head, body)
        return Rule(head, body, tuple(free_vars_of_rule(rule)))

    def kb(self):
        asserts = tuple(self.clause() for _ in range(self.rng.randint(1, 8)))
        queries = tuple(self.condition() for _ in range(self.rng.randint(0, 2)))
        prefixes = (("ex", EX),) if self.rng.random() < 0.5 else ()
        return KB(asserts=asserts, queries=queries, prefixes=prefixes)


def free_vars_of_rule(rule):
    seen = []
    for v in free_vars(rule.head) + free_vars(rule.body):
        if v not in seen:
            seen.append(v)
    return seen


def fuzz_kb(seed: int) -> KB:
    return FuzzKB(seed).kb()


# ------------------------------------------------------------ Datalog fragment

class RandomDatalog:
    """Relational Datalog KB (oidless, single dependent tuple per atom) kept
    alongside a plain-tuple copy for the bottom-up oracle."""

    def __init__(self, seed: int, max_facts=50, max_rules=10, max_body=4):
        rng = random.Random(seed)
        self.rng = rng
        preds = {f"e{i}": rng.randint(1, 3) for i in range(rng.randint(2, 5))}
        self.arity = preds
        consts = [f"c{i}" for i in range(rng.randint(2, 6))]
        self.consts = consts
        self.facts = set()
        for _ in range(rng.randint(1, max_facts)):
            p = rng.choice(list(preds))
            self.facts.add((p, tuple(rng.choice(consts) for _ in range(preds[p]))))
        self.rules = []
        for _ in range(rng.randint(0, max_rules)):
            body = []
            for _ in range(rng.randint(1, max_body)):
                p = rng.choice(list(preds))
                body.append((p, tuple(self._arg(0.6) for _ in range(preds[p]))))
            body_vars = [a for _, args in body for a in args if a.startswith("?")]
            head_p = rng.choice(list(preds))
            head_args = tuple(rng.choice(body_vars) if body_vars and rng.random() < 0.8
                              else rng.choice(consts) for _ in range(preds[head_p]))
            self.rules.append(((head_p, head_args), body))

    def _arg(self, p_var):
        if self.rng.random() < p_var:
            return "?" + self.rng.choice("XYZW")
        return self.rng.choice(self.consts)

    def source(self) -> str:
        def atom(p, args):
            return f"_{p}(" + " ".join(a if a.startswith("?") else "_" + a for a in args) + ")"
        lines = [atom(p, a) for p, a in sorted(self.facts)]
        for (hp, ha), body in self.rules:
            vs = sorted({a for _, args in [(hp, ha)] + body for a in args if a.startswith("?")})
            text = atom(hp, ha) + " :- And(" + " ".join(atom(p, a) for p, a in body) + ")"
            lines.append(f"Forall {' '.join(vs)} ({text})" if vs else text)
        return "RuleML(Assert(\n" + "\n".join(lines) + "\n))\n"

    def probes(self, n: int):
        out = []
        for _ in range(n):
            p = self.rng.choice(list(self.arity))
            out.append((p, tuple(self.rng.choice(self.consts) for _ in range(self.arity[p]))))
        return out
