import pytest
from hypothesis import given, strategies as st

from repairlp.compiler import RepairMode, persistence_rules
from repairlp.errors import ParseError, SchemaError, UnsafeError
from repairlp.model import (
    NULL, Atom, BodyLiteral, DatabaseInstance, Literal, Program, QAnd, QExists, QK, QNot, QOr, Rule, RuleKind, Schema,
    Var, free_vars,
)
from repairlp.parser import (
    emit_dlv, emit_facts, format_schema, parse_constraints, parse_domain, parse_instance, parse_program, parse_query,
    parse_schema,
)

X, Y, Z = Var("X"), Var("Y"), Var("Z")


def test_parse_salary_facts():
    r = parse_instance('salary("V.Smith",5000). salary("V.Smith",8000).')
    assert len(r) == 2
    assert Atom("salary", ("V.Smith", 5000)) in r


@pytest.mark.parametrize("src,n", [("", 0), ("p(a,b). p(a,b).", 1), ("% comment\nq.", 1)])
def test_fact_counts(src, n):
    assert len(parse_instance(src)) == n


@pytest.mark.parametrize("src,err", [
    ("p(a", ParseError), ("p(X).", ParseError), ("p(a,null).", ParseError), ("p(a). p(a,b).", SchemaError),
])
def test_bad_facts(src, err):
    with pytest.raises(err):
        parse_instance(src)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_instance("p(a).\nq(b", filename="x.facts")
    assert info.value.span.line == 2
    assert "x.facts:2" in str(info.value)


def test_schema_header_with_sorts():
    s = parse_schema("%! emp:2:name,number\n%! p:0")
    assert s["emp"].arity == 2 and s.sort_of("emp", 0) == "name"
    assert s["p"].arity == 0
    assert parse_schema(format_schema(s)) == s


def test_fd_in_implication_form():
    (c,) = parse_constraints("salary(X,Y), salary(X,Z) -> Y=Z.")
    assert c.positives == ()
    assert c.negatives == (Atom("salary", (X, Y)), Atom("salary", (X, Z)))
    assert c.phi == (Atom("=", (Y, Z)),)
    assert parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z.") == [c]


def test_inclusion_dependency():
    (c,) = parse_constraints("p(X,Y) -> q(X,Y).")
    assert c.positives == (Atom("q", (X, Y)),) and c.negatives == (Atom("p", (X, Y)),) and c.phi == ()


def test_referential_constraint():
    (c,) = parse_constraints("p(X) -> exists Z r(X,Z).")
    assert c.existential is not None
    assert c.existential.target == Atom("r", (X, Z))
    assert c.existential.variables == (Z,)


@pytest.mark.parametrize("src", ["p(X) | !q(X).", "p(X) v ~q(X).", "p(X) v -q(X)."])
def test_negation_and_disjunction_spellings(src):
    (c,) = parse_constraints(src)
    assert c.positives == (Atom("p", (X,)),) and c.negatives == (Atom("q", (X,)),)


def test_constraint_schema_check():
    with pytest.raises(SchemaError):
        parse_constraints("p(X,Y) -> q(X).", Schema({"p": 1, "q": 1}))


def test_query_salary_is_wrapped_in_k():
    q = parse_query("salary(X,Y)")
    assert isinstance(q, QK)
    assert free_vars(q) == [X, Y]


def test_query_exists_scopes_over_conjunction():
    q = parse_query('exists Y salary("V.Smith",Y) & Y > 4000')
    assert isinstance(q.body, QExists) and isinstance(q.body.body, QAnd)
    assert free_vars(q) == []


def test_disjunctive_query():
    q = parse_query("p(X,a) | q(a,X)")
    assert isinstance(q.body, QOr) and free_vars(q) == [X]


def test_k_combination_is_not_rewrapped():
    q = parse_query("K(p(X)) & !K(q(X))")
    assert isinstance(q, QAnd) and isinstance(q.parts[1], QNot)


@pytest.mark.parametrize("src", ["!p(X)", "X > 3", "p(X) | q(Y)"])
def test_unsafe_queries(src):
    with pytest.raises(UnsafeError):
        parse_query(src)


def test_emit_persistence_rule():
    s = parse_schema("%! emp:2")
    text = emit_dlv(persistence_rules(s, RepairMode.WINSLETT))
    assert "emp_p(X1,X2) :- emp(X1,X2), not -emp_p(X1,X2)." in text.splitlines()


def test_emit_weak_constraint():
    p = Atom("p", (X,))
    w = Rule((), (BodyLiteral(Literal(p.prime())), BodyLiteral(Literal(p), True)), RuleKind.WEAK_CONSTRAINT)
    assert emit_dlv([w]) == ":~ p_p(X), not p(X).\n"


def test_emit_empty_program():
    assert emit_dlv(Program()) == ""


def test_program_round_trip():
    s = parse_schema("%! p:1 q:1")
    src = "q_p(X) v -p_p(X) :- p(X), not q(X).\n:~ p_p(X), not p(X).\n:- q_p(a).\naux_h(X) :- q_p(X).\n"
    prog = parse_program(src, s)
    assert emit_dlv(prog) == src
    assert prog.rules[0].head[0].atom.primed
    assert prog.rules[1].kind is RuleKind.WEAK_CONSTRAINT


def test_domain_file():
    assert parse_domain("a, b. 3\n\"V.Smith\"") == ["a", "b", 3, "V.Smith"]
    with pytest.raises(ParseError):
        parse_domain("")
    with pytest.raises(ParseError):
        parse_domain("X")


names = st.sampled_from(["a", "b", "V.Smith", "Irwin Koper", "x_1", 'q"t'])
consts = st.one_of(st.integers(-50, 5000), names)


@given(st.sets(st.tuples(st.sampled_from(["p", "q"]), consts, consts), max_size=8))
def test_facts_round_trip(rows):
    r = DatabaseInstance(Schema({"p": 2, "q": 2}), {Atom(p, (a, b)) for p, a, b in rows})
    back = parse_instance(emit_facts(r), r.schema)
    assert back.facts == r.facts


@given(st.lists(st.tuples(st.booleans(), st.sampled_from(["p", "q", "s"])), min_size=1, max_size=4))
def test_parsed_constraints_are_well_formed(lits):
    src = " v ".join(("-" if neg else "") + f"{p}(X)" for neg, p in lits) + "."
    (c,) = parse_constraints(src)
    assert c.size == len(lits) >= 1
    assert NULL not in c.constants()
