import random

import pytest

from repairlp.compiler import repair_program
from repairlp.cqa import RepairConfig, repairs_of
from repairlp.errors import GroundingError, UnsafeError
from repairlp.grounder import ACTIVE, DomainDeclaration, active_domain, ground
from repairlp.model import NULL, Atom, BodyLiteral, Literal, Program, Rule, Var, complement
from repairlp.oracle import random_bic_instance
from repairlp.parser import parse_constraints, parse_instance, parse_program, parse_query
from repairlp.solver import answer_sets

from conftest import text


def test_active_domain_of_salary(salary):
    r, ics = salary
    assert active_domain(r, ics) == {"V.Smith", "P.Jones", "M.Stone", 5000, 8000, 3000, 7000}


def test_active_domain_of_empty_instance():
    r = parse_instance("%! q:0 r:0")
    assert active_domain(r, parse_constraints("q v r.")) == set()


def test_active_domain_includes_query_constants():
    r = parse_instance("p(a).")
    assert active_domain(r, (), parse_query("p(b)")) == {"a", "b"}


def test_finite_domain_program_has_single_answer_set():
    r = parse_instance("p(a).")
    g = ground(repair_program(parse_constraints("p(X)."), r.schema), r, DomainDeclaration.finite("abc"))
    (s,) = answer_sets(g)
    assert text(s) == {"dom(a)", "dom(b)", "dom(c)", "p(a)", "p_p(a)", "p_p(b)", "p_p(c)"}


def test_builtins_are_evaluated_away():
    r = parse_instance("p(a,b). p(a,c).")
    prog = parse_program("-p_p(X,Y) v -p_p(X,Z) :- p(X,Y), p(X,Z), Y != Z.", r.schema)
    g = ground(prog, r)
    trig = [x for x in g.rules if len(x.head) == 2]
    assert {tuple(sorted(l.atom.args[1] for l in x.head)) for x in trig} == {("b", "c")}
    assert all(not b.lit.atom.is_builtin for x in g.rules for b in x.body)


def test_variable_free_program_is_kept():
    r = parse_instance("%! q:0 r:0")
    prog = parse_program("q_p v r_p.\ns :- q_p.", r.schema)
    g = ground(prog, r)
    assert {str(x) for x in g.rules} == {"q' v r'.", "s :- q'."}


def test_universe_closed_under_complement():
    r = parse_instance("p(a,b). q(b,c).")
    g = ground(repair_program(parse_constraints("p(X,Y) -> q(X,Y)."), r.schema), r)
    assert all(complement(l) in g.universe for l in g.universe)
    for rule in g.rules:
        assert set(rule.head) <= g.universe
        assert {b.lit for b in rule.body} <= g.universe


def test_declared_domain_must_cover_instance():
    r = parse_instance("p(a). p(z).")
    with pytest.raises(GroundingError):
        ground(repair_program(parse_constraints("p(X)."), r.schema), r, DomainDeclaration.finite("ab"))


def test_unsafe_rules_are_rejected():
    r = parse_instance("p(a).")
    x = Var("X")
    bad = Program([Rule((Literal(Atom("q", (x,))),), (BodyLiteral(Literal(Atom("p", (x,))), True),))])
    with pytest.raises(UnsafeError):
        ground(bad, r)


def test_domain_declaration_validation():
    with pytest.raises(ValueError):
        DomainDeclaration("finite", frozenset())
    with pytest.raises(ValueError):
        DomainDeclaration.finite([NULL])
    with pytest.raises(ValueError):
        DomainDeclaration("infinite")
    assert ACTIVE.kind == "active"


def test_sorted_guards_split_constants():
    r = parse_instance('%! emp:2:name,number\nemp("Irwin Koper","677-223-112").')
    g = ground(repair_program(parse_constraints("-emp(X,Y) v -emp(X,Z) v Y=Z."), r.schema), r)
    assert Literal(Atom("dom_name", ("Irwin Koper",))) in g.facts
    assert Literal(Atom("dom_name", ("677-223-112",))) not in g.facts


@pytest.mark.parametrize("simplify", [True, False])
def test_simplified_and_exhaustive_grounding_agree(simplify):
    r = parse_instance("p(a,b). q(b,c).")
    prog = repair_program(parse_constraints("p(X,Y) -> q(X,Y)."), r.schema)
    sets = answer_sets(ground(prog, r, simplify=simplify))
    projected = {frozenset(l for l in s if l.atom.primed) for s in sets}
    reference = {frozenset(l for l in s if l.atom.primed) for s in answer_sets(ground(prog, r))}
    assert projected == reference


@pytest.mark.parametrize("seed", range(25))
def test_active_and_larger_domain_give_same_repairs(seed):
    r, ics, dom = random_bic_instance(random.Random(seed))
    # every generated constraint has a negative literal binding its variables
    assert all(c.negatives for c in ics)
    act = {x.instance for x in repairs_of(r, ics, RepairConfig(domain=ACTIVE))}
    wide = {x.instance for x in repairs_of(r, ics, RepairConfig(domain=DomainDeclaration.finite(list(dom) + [99])))}
    assert act == wide
