import random

import pytest

from repairlp.compiler import RepairMode, repair_program
from repairlp.errors import InconsistentProgram, ResourceLimitExceeded
from repairlp.grounder import DomainDeclaration, ground
from repairlp.model import AnswerSet, Atom, BodyLiteral, Literal, Rule, RuleKind
from repairlp.oracle import enumerate_answer_sets_naive, random_ground_program
from repairlp.parser import parse_constraints, parse_instance, parse_program
from repairlp.solver import (
    SolveStats, answer_sets, filter_strong, minimal_models, optimize_weak, reduct, satisfies_rule, weak_violations,
)

from conftest import primed_text, text


def L(name, *args, neg=False, primed=False):
    return Literal(Atom(name, tuple(args), primed), neg)


P, NP = L("p", "a", primed=True), L("p", "a", primed=True, neg=True)
PA = L("p", "a")


def test_reduct_drops_rule_blocked_by_naf():
    r = Rule((NP,), (BodyLiteral(PA, True), BodyLiteral(P, True)))
    assert reduct([r], {PA}) == []


def test_reduct_strips_satisfied_naf():
    r = Rule((P,), (BodyLiteral(PA), BodyLiteral(NP, True)))
    (out,) = reduct([r], {PA, P})
    assert out.head == (P,) and out.body == (BodyLiteral(PA),)


def test_reduct_deletes_overridden_default():
    d = Rule((P,), (BodyLiteral(PA),), RuleKind.PERSISTENCE_DEFAULT)
    assert reduct([d], {PA, NP}, e_mode=True) == []
    assert len(reduct([d], {PA, NP}, e_mode=False)) == 1


def test_minimal_models_of_disjunction():
    q, r = L("q", primed=True), L("r", primed=True)
    assert minimal_models([Rule((q, r), ())]) == {AnswerSet({q}), AnswerSet({r})}


def test_minimal_models_horn_closure():
    a, b = L("a"), L("b")
    assert minimal_models([Rule((a,), ()), Rule((b,), (BodyLiteral(a),))]) == {AnswerSet({a, b})}


def test_minimal_models_reject_naf():
    with pytest.raises(ValueError):
        minimal_models([Rule((L("a"),), (BodyLiteral(L("b"), True),))])


def inclusion_program():
    r = parse_instance("p(a,b). q(b,c).")
    return ground(repair_program(parse_constraints("p(X,Y) -> q(X,Y)."), r.schema), r)


def test_example4_reduct_has_answer_set_as_unique_minimal_model(backend):
    g = inclusion_program()
    for s in answer_sets(g):
        assert minimal_models(reduct(g.rules, s)) == {s}


def test_example4_answer_sets(backend):
    sets = answer_sets(inclusion_program())
    assert len(sets) == 2
    marks = [{"-p_p(a,b)", "q_p(a,b)"} & primed_text(s) for s in sets]
    assert sorted(map(sorted, marks)) == [["-p_p(a,b)"], ["q_p(a,b)"]]


def test_example6_answer_sets(backend):
    r = parse_instance("%! q:0 r:0 s:0")
    g = ground(repair_program(parse_constraints("q v r. s v -q. s v -r."), r.schema), r)
    assert [primed_text(s) for s in answer_sets(g)] == [{"-r_p", "q_p", "s_p"}, {"-q_p", "r_p", "s_p"}]


def test_strong_constraint_kills_everything(backend):
    a = L("a")
    assert answer_sets([Rule((a,), ()), Rule((), (BodyLiteral(a),), RuleKind.STRONG_CONSTRAINT)]) == []


def test_inconsistent_program_is_reported(backend):
    a = L("a")
    with pytest.raises(InconsistentProgram):
        answer_sets([Rule((a,), ()), Rule((Literal(a.atom, True),), ())])


def test_no_answer_set_is_not_inconsistency(backend):
    a = L("a")
    assert answer_sets([Rule((a,), (BodyLiteral(a, True),))]) == []


def test_branch_limit(backend):
    r = parse_instance(" ".join(f'salary("e{i}",1). salary("e{i}",2).' for i in range(4)))
    g = ground(repair_program(parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z."), r.schema), r)
    with pytest.raises(ResourceLimitExceeded):
        answer_sets(g, max_branches=2)
    stats = SolveStats()
    assert len(answer_sets(g, stats=stats)) == 16
    assert stats.candidates == 16


def test_branch_limit_from_environment(backend, monkeypatch):
    monkeypatch.setenv("REPAIRLP_MAX_BRANCHES", "1")
    r = parse_instance("salary(a,1). salary(a,2). salary(b,1). salary(b,2).")
    g = ground(repair_program(parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z."), r.schema), r)
    with pytest.raises(ResourceLimitExceeded):
        answer_sets(g)


def dalal_91():
    r = parse_instance("%! p:1 q:1 r:1\np(a).")
    ics = parse_constraints("-p(X) v q(X). -q(X) v r(X).")
    prog = repair_program(ics, r.schema, RepairMode.DALAL)
    return ground(prog, r, DomainDeclaration.finite("a"))


def test_optimize_weak_keeps_fewest_violations(backend):
    g = dalal_91()
    sets = answer_sets(g)
    assert len(sets) == 2
    assert sorted(weak_violations(s, g.weak) for s in sets) == [1, 2]
    (best,) = optimize_weak(sets, g.weak)
    assert primed_text(best) == {"-p_p(a)"}


def test_optimize_weak_identities():
    sets = [AnswerSet({L("a")}), AnswerSet({L("b")})]
    assert optimize_weak(sets, []) == sets
    w = Rule((), (BodyLiteral(L("a")),), RuleKind.WEAK_CONSTRAINT)
    assert optimize_weak(sets[:1], [w]) == sets[:1]


def test_filter_strong_ssn_scenario(backend, emp):
    r = parse_instance('%! emp:2:name,number\nemp("Irwin Koper","677-223-112"). '
                       'emp("Irwin Koper","952-223-564"). emp("Michael Baneman","952-223-564").')
    _, ics = emp
    extra = parse_program('has_ssn(X) :- emp_p(X,Y).\n:- dom_name(X), not has_ssn(X).', r.schema)
    g = ground(repair_program(ics, r.schema) + extra, r)
    sets = answer_sets(g, strong=False)
    assert len(sets) == 2
    assert len(filter_strong(sets, g.strong)) == 1
    assert filter_strong(sets, []) == sets
    everything = Rule((), (BodyLiteral(L("dom", "Irwin Koper")),), RuleKind.STRONG_CONSTRAINT)
    assert filter_strong(sets, [everything]) == []


@pytest.mark.parametrize("seed", range(40))
def test_answer_sets_are_consistent_models(seed, backend):
    rng = random.Random(seed)
    rules = random_ground_program(rng)
    try:
        sets = answer_sets(rules)
    except InconsistentProgram:
        return
    for s in sets:
        assert all(Literal(l.atom, not l.neg) not in s for l in s)
        assert all(satisfies_rule(r, s) for r in rules)


@pytest.mark.parametrize("seed", range(40))
def test_solver_matches_naive_enumeration(seed, backend):
    rng = random.Random(1000 + seed)
    e_mode = seed % 2 == 1
    rules = random_ground_program(rng, defaults=e_mode)
    expected = set(enumerate_answer_sets_naive(rules, e_mode=e_mode))
    try:
        got = set(answer_sets(rules, e_mode=e_mode))
    except InconsistentProgram:
        got = set()
    assert got == expected


def test_answer_sets_are_sorted_and_deterministic(backend):
    g = inclusion_program()
    first = answer_sets(g)
    assert first == answer_sets(g)
    assert [text(s) for s in first] == [text(s) for s in answer_sets(inclusion_program())]
