from collections import Counter

import pytest

from corpus import kb1, kb2, workload_kb

from psoa import transform as T
from psoa.core import TOP, And, Atom, Local, Rule, Var
from psoa.engine import Engine
from psoa.parser import parse_kb, parse_query
from psoa.printer import print_presentation, print_term

PRE = ("Prefix(func: <http://www.w3.org/2007/rif-builtin-function#>) "
       "Prefix(pred: <http://www.w3.org/2007/rif-builtin-predicate#>)")


def kb(src):
    return parse_kb(f"RuleML({PRE} Assert({src}))")


def lines(k):
    return [ln for ln in print_presentation(k).splitlines() if ln and not ln.startswith("Prefix")]


def head(src):
    return parse_kb(src).asserts[0].head


def rows(k, query):
    ans = Engine(k).ask(parse_query(query, k.prefix_map()))
    return ans.success, Counter(frozenset((v.name, print_term(b[v])) for v in ans.variables)
                                for b in ans.bindings)


# unnesting

def test_unnest_hoists_oidful_argument():
    assert lines(T.unnest(kb("Forall ?x (r(?x) :- p(q1#c(?x) b))"))) == [
        "Forall ?x (r(?x) :- And(q1#c(?x) p(q1 b)))"]


def test_unnest_nested_in_nested_single_pass():
    out = T.unnest(kb("p(q1#c(a#d(z)) b)"))
    assert lines(out) == ["And(a#d(z) q1#c(a) p(q1 b))"]
    assert T.unnest(out) == out


def test_unnest_preserves_answers():
    src = kb("q1#c(a) p(q1 b) Forall ?x (r(?x) :- p(q1#c(?x) b))")
    assert rows(src, "r(?y)") == rows(T.unnest(src), "r(?y)")
    assert rows(src, "r(?y)")[1] == Counter([frozenset({("y", "a")})])


def test_unnest_without_nesting_is_identity():
    k = kb("p(a b) o#q(s->v)")
    assert T.unnest(k) == k


# subclass rewriting

def test_subclass_fact_becomes_membership_rule():
    assert lines(T.rewrite_subpredicates(kb("TA##Teacher Teacher##Scholar"))) == [
        "Forall ?o (?o#Teacher :- ?o#TA)", "Forall ?o (?o#Scholar :- ?o#Teacher)"]


def test_subclass_chaining_reaches_scholar():
    k = kb("TA##Teacher Teacher##Scholar John#TA")
    assert rows(k, "John#Scholar")[0]


def test_subclass_with_variables_rejected():
    with pytest.raises(T.TransformError):
        T.rewrite_subpredicates(parse_kb("Forall ?x ?y (?x##?y)"))


def test_cyclic_taxonomy_terminates():
    k = kb("a##b b##a x#a")
    assert len(lines(T.rewrite_subpredicates(k))) == 3
    assert rows(k, "x#b")[0]
    assert not rows(k, "y#a")[0]


# default expansion

def test_default_all_independent_goes_to_top():
    out = T.expand_defaults(kb("Student{acquire->KSAs aptitude->comprehension}"))
    assert lines(out) == ["Forall ?o (?o#Top(acquire->KSAs aptitude->comprehension) :- ?o#Student)"]


def test_default_with_independent_tuple_goes_to_top():
    out = T.expand_defaults(kb("Teacher{-[2 3] offer->service aptitude->explanation}"))
    assert lines(out) == [
        "Forall ?o (?o#Top(-[2 3] offer->service aptitude->explanation) :- ?o#Teacher)"]


def test_default_with_dependent_descriptor_keeps_predicate():
    assert lines(T.expand_defaults(kb("C{s+>v}"))) == ["Forall ?o (?o#C(s+>v) :- ?o#C)"]


# relational predicates

def test_relational_detection_by_definition():
    k = kb("p(a b) q(a) q(s->b) o#r(a) s(-[a]) t() u(+[a] +[b])")
    assert T.detect_relational_predicates(k) == frozenset({Local("p")})


def test_kb1_has_no_relational_predicates():
    assert T.detect_relational_predicates(parse_kb(kb1())) == frozenset()


def test_chain_predicates_are_relational():
    k = kb("r0(a1 a2 a3) Forall ?x ?y ?z (r1(?x ?y ?z) :- r0(?x ?y ?z))")
    assert T.detect_relational_predicates(k) == frozenset({Local("r0"), Local("r1")})


# objectification

def test_static_objectification_minimal_unused_constants():
    out = T.objectify(kb("Teacher() _1#q() p(a) Forall ?x (r(?x) :- s(?x))"))
    assert lines(out) == ["_2#Teacher", "_1#q", "_3#p(a)",
                          "Forall ?x ?_o1 (Exists ?_o2 (?_o2#r(?x)) :- ?_o1#s(?x))"]


def test_static_objectification_of_oidless_fact():
    assert lines(T.objectify(kb("Teacher()"))) == ["_1#Teacher"]


def test_dynamic_objectification_keeps_relational_atoms():
    out = T.objectify(kb("Teacher() _1#q() p(a) Forall ?x (r(?x) :- s(?x))"), "dynamic")
    assert lines(out) == ["_2#Teacher", "_1#q", "p(a)", "Forall ?x (r(?x) :- s(?x))"]


def test_objectification_of_oidful_kb_is_identity():
    k = parse_kb(kb1())
    for mode in T.ObjectificationMode:
        assert T.objectify(k, mode) == k


def test_dynamic_query_demanding_oid_of_relation():
    k = kb("p(a b)")
    ok, got = rows(k, "?o#p(a ?y)")
    assert ok and len(got) == 1
    (row,) = got
    assert ("y", "b") in row


def test_dynamic_query_on_relation_with_wrong_shape_fails():
    k = kb("p(a b)")
    assert not rows(k, "p(a)")[0]
    assert not rows(k, "p(s->a)")[0]


# describution

def test_describution_of_teacher_fact():
    out = T.describute_atom(head("John#Teacher(+[Wed Thu] dept+>Physics salary+>29400 income->29400)"))
    expected = head("And(John#Teacher John#Teacher(+[Wed Thu]) John#Teacher(dept+>Physics) "
                    "John#Teacher(salary+>29400) John#Top(income->29400))")
    assert out == expected


def test_describution_of_student_fact():
    out = T.describute_atom(head("John#Student(+[Mon Tue Fri] -[1995 8 17] dept+>Math gender->male)"))
    assert isinstance(out, And) and len(out.items) == 5
    assert head("John#Top(-[1995 8 17])") in out.items
    assert head("John#Top(gender->male)") in out.items


def test_describution_of_empty_atom():
    a = head("o#f()")
    assert T.describute_atom(a) == a


def test_condition_membership_goes_last_for_variable_oid():
    a = Atom(Local("f"), head("o#f(a)").descs, Var("o"))
    assert T.describute_atom(a, condition=True).items[-1] == Atom(Local("f"), (), Var("o"))
    assert T.describute_atom(a).items[0] == Atom(Local("f"), (), Var("o"))


def test_describution_leaves_relational_atoms():
    a = head("p(a b)")
    assert T.describute_atom(a) == a


def test_describution_count_law():
    a = head("o#f(+[a] +[b] -[c] s+>1 t+>2 u->3)")
    assert len(T.describute_atom(a).items) == 1 + 2 + 1 + 2 + 1


# skolemization

def test_skolemize_head_existential():
    assert lines(T.skolemize(kb("Forall ?x (Exists ?y (p(?x ?y)) :- q(?x))"))) == [
        "Forall ?x (p(?x skolem1(?x)) :- q(?x))"]


def test_skolemized_rule_answers():
    k = kb("q(a) Forall ?x (Exists ?y (p(?x ?y)) :- q(?x))")
    assert rows(k, "p(a ?z)")[0]


def test_skolemize_fact_existential_becomes_constant():
    assert lines(T.skolemize(kb("Exists ?y (o#c(s->?y))"))) == ["o#c(s->skolem1)"]


def test_skolem_arguments_are_only_scope_variables():
    out = T.skolemize(kb("Forall ?x ?z (Exists ?y (p(?x ?y)) :- q(?x ?z))"))
    assert lines(out) == ["Forall ?x ?z (p(?x skolem1(?x)) :- q(?x ?z))"]


def test_skolemize_without_existentials_is_identity():
    k = kb("Forall ?x (p(?x) :- q(?x))")
    assert T.skolemize(k) == k


# splitting

def test_split_nested_conjunction():
    out = T.split_conjunctive_conclusions(kb("Forall ?x (And(a#p(?x) And(b#q(?x) c#r)) :- s(?x))"))
    assert lines(out) == ["Forall ?x (a#p(?x) :- s(?x))", "Forall ?x (b#q(?x) :- s(?x))",
                          "Forall ?x (c#r :- s(?x))"]


def test_split_descributed_teacher_fact_into_five():
    k = T.describute(kb("John#Teacher(+[Wed Thu] dept+>Physics salary+>29400 income->29400)"))
    assert len(T.split_conjunctive_conclusions(k).asserts) == 5


def test_split_single_head_is_identity():
    k = kb("Forall ?x (p(?x) :- q(?x))")
    assert T.split_conjunctive_conclusions(k) == k


# external flattening

def test_flatten_nested_external():
    out = T.flatten_externals(kb("Forall ?x (r(?x) :- p(External(func:numeric-add(1 2))))"))
    assert lines(out) == [
        "Forall ?x ?_v1 (r(?x) :- And(?_v1 = External(func:numeric-add(1 2)) p(?_v1)))"]


def test_flattened_external_evaluates():
    k = kb("p(3) Forall ?x (r(?x) :- And(q(?x) p(External(func:numeric-add(1 2)))))  q(a)")
    assert rows(k, "r(?y)")[1] == Counter([frozenset({("y", "a")})])


def test_formula_level_external_untouched():
    k = kb("Forall ?x (r(?x) :- And(s(?x) External(pred:numeric-greater-than(?x 10))))")
    assert T.flatten_externals(k) == k


def test_external_in_fact_rejected():
    with pytest.raises(T.TransformError):
        T.flatten_externals(kb("p(External(func:numeric-add(1 2)))"))


# pipeline

def test_empty_pipeline():
    assert T.run_pipeline(parse_kb(""), "static").asserts == ()


def test_workload_pipeline_is_horn_and_deterministic():
    k = parse_kb(workload_kb())
    a = T.run_pipeline(k, "dynamic")
    assert a == T.run_pipeline(k, "dynamic")
    for c in a.asserts:
        assert isinstance(c, Rule)
        assert isinstance(c.head, Atom)
    subclass_rules = [c for c in a.asserts if c.body is not None and isinstance(c.head, Atom)
                      and c.head.descs == () and isinstance(c.head.oid, Var)
                      and isinstance(c.body, Atom) and c.body.descs == ()]
    assert len(subclass_rules) == 4


def test_pipeline_stage_callback_sees_every_stage():
    seen = []
    T.run_pipeline(parse_kb(kb2()), "static", on_stage=lambda name, k: seen.append(name))
    assert tuple(seen) == T.STAGES


def test_kb2_pipeline_answers_match_kb1():
    for q in ["_John#_Teacher(_dept+>?d)", "?x#_Top(_income->?i)", "_John#_Student(?a ?b ?c)"]:
        assert rows(parse_kb(kb1()), q) == rows(parse_kb(kb2()), q)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        T.as_mode("sometimes")
