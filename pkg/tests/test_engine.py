from collections import Counter
from decimal import Decimal

import pytest

from corpus import kb1, workload_kb
from kbgen import RandomDatalog
from oracle import least_model

from psoa.core import Number
from psoa.engine import (Answer, BuiltinTypeError, Engine, EngineConfig, InstantiationError,
                         LoadError, UnknownBuiltinError, answer_format, evaluate_builtin, solve)
from psoa.parser import parse_kb, parse_query
from psoa.printer import print_term
from psoa.runtime import parse_prolog

PRE = ("Prefix(func: <http://www.w3.org/2007/rif-builtin-function#>) "
       "Prefix(pred: <http://www.w3.org/2007/rif-builtin-predicate#>) "
       "Prefix(ex: <http://ex.org/>)")

GRAPH = ("n(1) n(2) n(3) e(a b) e(b c) e(c a) "
         "Forall ?x ?y (p(?x ?y) :- e(?x ?y)) "
         "Forall ?x ?y ?z (p(?x ?z) :- And(e(?x ?y) p(?y ?z)))")


def kb(src):
    return parse_kb(f"RuleML({PRE} Assert({src}))")


def ask(k, query, **cfg):
    return Engine(k, EngineConfig(**cfg)).ask(parse_query(query, k.prefix_map()))


def values(answer, var):
    return sorted(print_term(b[v]) for b in answer.bindings for v in answer.variables
                  if v.name == var)


@pytest.mark.parametrize("mode", ["static", "dynamic"])
def test_builtin_predicate_filters(mode):
    a = ask(kb(GRAPH), "And(n(?x) External(pred:numeric-greater-than(?x 1)))", objectification=mode)
    assert values(a, "x") == ["2", "3"]


def test_builtin_function_binds_by_equation():
    a = ask(kb(GRAPH), "And(n(?x) ?y = External(func:numeric-multiply(?x 2)))")
    assert values(a, "y") == ["2", "4", "6"]


def test_nested_builtin_function_in_predicate():
    q = "And(n(?x) External(pred:numeric-equal(External(func:numeric-integer-divide(?x 2)) 1)))"
    assert values(ask(kb(GRAPH), q), "x") == ["2", "3"]


@pytest.mark.parametrize("name, args, expected", [
    ("pred:numeric-less-than-or-equal", (2, 2), True),
    ("pred:numeric-not-equal", (2, 2), False),
    ("func:numeric-subtract", (5, 7), Number(Decimal(-2))),
    ("func:numeric-mod", (7, 3), Number(Decimal(1))),
])
def test_evaluate_builtin(name, args, expected):
    ns = {"pred": "http://www.w3.org/2007/rif-builtin-predicate#",
          "func": "http://www.w3.org/2007/rif-builtin-function#"}
    pre, local = name.split(":")
    assert evaluate_builtin(ns[pre] + local, [Number(Decimal(a)) for a in args]) == expected


def test_unbound_builtin_argument_raises():
    with pytest.raises(InstantiationError):
        ask(kb(GRAPH), "External(pred:numeric-greater-than(?x 1))")


def test_unknown_builtin_raises():
    with pytest.raises(UnknownBuiltinError):
        ask(kb(GRAPH), "External(ex:foo(1 2))")


def test_non_numeric_builtin_argument_raises():
    with pytest.raises(BuiltinTypeError):
        ask(kb(GRAPH), "External(pred:numeric-greater-than(a 1))")


def test_division_by_zero_raises():
    with pytest.raises(BuiltinTypeError):
        ask(kb(GRAPH), "And(n(?x) ?y = External(func:numeric-divide(?x 0)))")


@pytest.mark.parametrize("mode", ["static", "dynamic"])
def test_head_only_variable_rejected_at_load(mode):
    with pytest.raises(LoadError):
        Engine(kb("Forall ?x ?y (p(?x ?y) :- q(?x)) q(a)"), EngineConfig(objectification=mode))


@pytest.mark.parametrize("mode", ["static", "dynamic"])
def test_recursive_closure_terminates_with_tabling(mode):
    assert values(ask(kb(GRAPH), "p(a ?z)", objectification=mode), "z") == ["a", "b", "c"]


def test_self_recursive_rule_terminates():
    assert values(ask(kb("Forall ?x (p(?x) :- p(?x)) p(a)"), "p(?x)"), "x") == ["a"]


def test_cyclic_taxonomy_terminates():
    a = ask(kb("a##b b##a x#a"), "?o#b")
    assert values(a, "o") == ["x"]


def test_untabled_depth_limit_cuts_off_cycles():
    a = ask(kb(GRAPH), "p(a ?z)", tabling=False, depth_limit=50, objectification="dynamic")
    assert a.depth_exceeded and values(a, "z") == ["a", "b", "c"]
    a = ask(kb(GRAPH), "p(a ?z)", tabling=False, depth_limit=2)
    assert a.depth_exceeded and values(a, "z") == ["b"]


def test_max_answers_truncates():
    a = ask(kb(GRAPH), "n(?x)", max_answers=2)
    assert len(a.bindings) == 2


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        EngineConfig(depth_limit=0)
    with pytest.raises(ValueError):
        EngineConfig(objectification="sometimes")


@pytest.mark.parametrize("seed", range(30))
def test_dynamic_mode_matches_oracle(seed):
    dl = RandomDatalog(seed)
    model = least_model(dl.facts, dl.rules)
    engine = Engine(parse_kb(dl.source()), EngineConfig(objectification="dynamic"))
    for pred, args in dl.probes(20):
        q = parse_query(f"_{pred}(" + " ".join("_" + a for a in args) + ")")
        assert engine.ask(q).success == ((pred, args) in model)


def test_modes_agree_on_kb1():
    k = parse_kb(kb1())
    for q in ["_John#?p(_dept+>?d)", "?o#_Top(?s->?v)", "_John#_Student(-[?y ?m ?d])"]:
        got = [Counter(frozenset((v.name, print_term(b[v])) for v in a.variables)
                       for b in a.bindings)
               for a in (ask(k, q, objectification=m) for m in ("static", "dynamic"))]
        assert got[0] == got[1] and got[0]


def test_solve_on_prolog_clauses():
    clauses = parse_prolog("e(a, b). e(b, c). p(X, Y) :- e(X, Y). p(X, Z) :- e(X, Y), p(Y, Z).")
    a = solve(clauses, parse_query("p(a ?z)"))
    assert a.success
    assert sorted(print_term(b[v]) for b in a.bindings for v in a.variables) == ["b", "c"]


def test_answer_format():
    assert answer_format(Answer(False)) == "fail"
    assert answer_format(Answer(True)) == "success"
    k = parse_kb(workload_kb())
    a = ask(k, "?who#_TA(_workload+>?level)")
    assert answer_format(a, prefixes=k.prefixes) == "?who=John ?level=high"
    assert answer_format(a, False, k.prefixes) == "?who=_John ?level=_high"
