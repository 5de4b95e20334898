"""Acceptance criteria 1 to 12.

Each test records a PASS/FAIL line in ``RESULTS``; ``conftest.py`` prints
them in the terminal summary.  Criterion 11 is split into its guarded and
naive halves and reported as one line.
"""
import random
import time

from repairlp.compiler import RepairMode, RicPolicy, StabilizerPolicy, compile_query_program, repair_program
from repairlp.cqa import RepairConfig, consistent_answers, evaluate_k_query, project_repair, repairs_of, run_pipeline, satisfies
from repairlp.errors import InconsistentProgram, NoAdmissibleRepair
from repairlp.grounder import DomainDeclaration, ground
from repairlp.oracle import (
    enumerate_answer_sets_naive, enumerate_repairs_bruteforce, random_bic_instance, random_fd_unary_instance,
    random_ground_program,
)
from repairlp.parser import parse_constraints, parse_instance, parse_program, parse_query
from repairlp.solver import answer_sets, satisfies_rule
from repairlp.wfs import core, primed_projection, well_founded

from conftest import facts_text, text

RESULTS: dict = {}
CORPUS = 200


def record(number, label, ok, detail=""):
    prev = RESULTS.get(number)
    if prev is not None:
        ok = ok and prev[0]
        detail = "; ".join(d for d in (prev[2], detail) if d)
    RESULTS[number] = (ok, label, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {label} {detail}".rstrip())


def check(number, label, condition, detail=""):
    record(number, label, bool(condition), detail)
    assert condition, detail or label


def instances(reps):
    return sorted(sorted(facts_text(x.instance)) for x in reps)


def test_criterion_01_inclusion_dependency():
    r = parse_instance("p(a,b). q(b,c).")
    ics = parse_constraints("p(X,Y) -> q(X,Y).")
    start = time.perf_counter()
    reps = repairs_of(r, ics)
    elapsed = time.perf_counter() - start
    got = instances(reps)
    ok = got == [["p(a,b)", "q(a,b)", "q(b,c)"], ["q(b,c)"]] and elapsed < 0.1
    check(1, "inclusion dependency repairs", ok, f"{elapsed * 1000:.1f} ms")


def test_criterion_02_salary():
    r = parse_instance('salary("V.Smith",5000). salary("V.Smith",8000). '
                       'salary("P.Jones",3000). salary("M.Stone",7000).')
    ics = parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z.")
    base = ['salary("M.Stone",7000)', 'salary("P.Jones",3000)']
    repairs_ok = instances(repairs_of(r, ics)) == [
        base + ['salary("V.Smith",5000)'], base + ['salary("V.Smith",8000)']]
    answers = consistent_answers(parse_query("salary(X,Y)"), r, ics).answers
    k = {
        'salary("V.Smith",5000) | salary("V.Smith",8000)': True,
        'exists X (salary("V.Smith",X) & X > 4000)': True,
        'K(salary("V.Smith",5000)) | K(salary("V.Smith",8000))': False,
    }
    k_ok = all(evaluate_k_query(parse_query(q), r, ics).truth is v for q, v in k.items())
    ok = repairs_ok and answers == {("P.Jones", 3000), ("M.Stone", 7000)} and k_ok
    check(2, "salary repairs, answers and K-queries", ok)


def test_criterion_03_finite_domain():
    r = parse_instance("p(a).")
    ics = parse_constraints("p(X).")
    d = DomainDeclaration.finite("abc")
    sets = answer_sets(ground(repair_program(ics, r.schema), r, d))
    reps = instances(repairs_of(r, ics, RepairConfig(domain=d)))
    expected = {"dom(a)", "dom(b)", "dom(c)", "p(a)", "p_p(a)", "p_p(b)", "p_p(c)"}
    ok = [text(s) for s in sets] == [expected] and reps == [["p(a)", "p(b)", "p(c)"]]
    check(3, "unique answer set over a declared domain", ok)


def test_criterion_04_disjunctive_core():
    r = parse_instance("%! q:0 r:0 s:0")
    g = ground(repair_program(parse_constraints("q v r. s v -q. s v -r."), r.schema), r)
    sets = answer_sets(g)
    got = sorted(sorted(text(s - g.facts)) for s in sets)
    w = well_founded(g)
    ok = (got == [["-q_p", "r_p", "s_p"], ["-r_p", "q_p", "s_p"]]
          and text(core(sets) - g.facts) == {"s_p"}
          and not primed_projection(w.true) and not primed_projection(w.false))
    check(4, "answer sets, core and empty well-founded part", ok)


def test_criterion_05_core_beyond_wfs():
    r = parse_instance("p(a,b). p(a,c).")
    ics = parse_constraints("-p(X,Y) v -p(X,Z) v Y=Z.")
    q = parse_query("exists Y p(X,Y)")
    qprog, _ = compile_query_program(q.body, RepairMode.WINSLETT, r.schema)
    g = ground(repair_program(ics, r.schema) + qprog, r, q=q)
    c = text(core(answer_sets(g)))
    w = well_founded(g)
    ok = ("query(a)" in c and "query(a)" not in text(w.true)
          and {"p_p(a,b)", "p_p(a,c)", "query(a)"} <= text(w.undefined))
    check(5, "query in the core but undefined in the well-founded model", ok)


def test_criterion_06_ssn():
    r = parse_instance('%! emp:2:name,number\n'
                       'emp("Irwin Koper","677-223-112"). emp("Irwin Koper","952-223-564"). '
                       'emp("Michael Baneman","334-454-991").')
    ics = parse_constraints("-emp(X,Y) v -emp(X,Z) v Y=Z.\n-emp(Y,X) v -emp(Z,X) v Y=Z.")
    reps = instances(repairs_of(r, ics))
    mb = 'emp("Michael Baneman","334-454-991")'
    ok = (reps == [['emp("Irwin Koper","677-223-112")', mb], ['emp("Irwin Koper","952-223-564")', mb]]
          and consistent_answers(parse_query("emp(X,Y)"), r, ics).answers == {("Michael Baneman", "334-454-991")})
    check(6, "two key constraints", ok)


def test_criterion_07_cardinality():
    r = parse_instance("%! p:1 q:1 r:1\np(a).")
    ics = parse_constraints("-p(X) v q(X). -q(X) v r(X).")
    d = DomainDeclaration.finite("a")
    dalal = instances(repairs_of(r, ics, RepairConfig(RepairMode.DALAL, domain=d)))
    win = instances(repairs_of(r, ics, RepairConfig(domain=d)))
    oracle = instances(enumerate_repairs_bruteforce(r, ics, ["a"], "cardinality"))
    ok = dalal == [[]] and win == [[], ["p(a)", "q(a)", "r(a)"]] and oracle == dalal
    check(7, "cardinality versus set-inclusion repairs", ok)


def test_criterion_08_referential():
    r = parse_instance("%! p:1 r:2\np(a). p(b). r(b,a).")
    ric = parse_constraints("p(X) -> exists Y r(X,Y).")

    def changes(reps):
        return sorted((sorted(map(str, x.inserted)), sorted(map(str, x.deleted))) for x in reps)

    null = changes(repairs_of(r, ric))
    delete = changes(repairs_of(r, ric, RepairConfig(ric_policy=RicPolicy.DELETE_ONLY)))
    ok = null == [([], ["p(a)"]), (["r(a,null)"], [])] and delete == [([], ["p(a)"])]
    check(8, "null insertion and delete-only referential repairs", ok)


def test_criterion_09_strong_constraint():
    r = parse_instance('%! emp:2:name,number\nemp("Irwin Koper","677-223-112"). '
                       'emp("Irwin Koper","952-223-564"). emp("Michael Baneman","952-223-564").')
    ics = parse_constraints("-emp(X,Y) v -emp(X,Z) v Y=Z.\n-emp(Y,X) v -emp(Z,X) v Y=Z.")
    extra = parse_program("has_ssn(X) :- emp_p(X,Y).\n:- dom_name(X), not has_ssn(X).", r.schema)
    run = run_pipeline(r, ics, extra=extra)
    names = consistent_answers(parse_query("exists Y emp(X,Y)"), r, ics, extra=extra).answers
    ok = len(run.all_sets) == 2 and len(run.sets) == 1 and names == {("Irwin Koper",), ("Michael Baneman",)}
    check(9, "strong constraint keeps one answer set", ok, f"{len(run.all_sets)} -> {len(run.sets)}")


def test_criterion_10_disjunctive_stabilizers_needed():
    r = parse_instance("p(a). q(a). r(a).")
    ics = parse_constraints("\n".join([
        "-p(X) v -q(X) v r(X).", "-p(X) v -q(X) v -r(X).", "-p(X) v q(X) v -r(X).", "p(X) v -q(X) v -r(X).",
        "-p(X) v q(X) v r(X).", "p(X) v -q(X) v r(X).", "p(X) v q(X) v -r(X).",
    ]))
    full = instances(repairs_of(r, ics))
    try:
        ablated = instances(repairs_of(r, ics, RepairConfig(policy=StabilizerPolicy.SINGLETON)))
    except NoAdmissibleRepair:
        ablated = []
    ok = full == [[]] and [] not in ablated
    check(10, "empty repair needs disjunctive stabilizers", ok, f"ablation found {len(ablated)} repair(s)")


TRANSITIVE = ("p(a,b). p(b,c).", "-p(X,Y) v -p(Y,Z) v p(X,Z).")
TRANSITIVE_REPAIRS = [["p(a,b)"], ["p(a,b)", "p(a,c)", "p(b,c)"], ["p(b,c)"]]


def _transitive(policy):
    r = parse_instance(TRANSITIVE[0])
    ics = parse_constraints(TRANSITIVE[1])
    return r, ics, run_pipeline(r, ics, RepairConfig(policy=policy, domain=DomainDeclaration.finite("abc")))


def test_criterion_11_guarded_transitivity():
    r, ics, run = _transitive(StabilizerPolicy.GUARDED)
    projections = {project_repair(s, r).instance for s in run.sets}
    ok = instances(run.repairs) == TRANSITIVE_REPAIRS and len(projections) == 3
    check(11, "transitivity: guarded gives 3 repairs, naive gives 3 + 6 spurious", ok, "guarded: 3 repairs")


def test_criterion_11_naive_transitivity():
    r, ics, run = _transitive(StabilizerPolicy.NAIVE)
    projections = {project_repair(s, r).instance for s in run.sets}
    genuine = {rep.instance for rep in repairs_of(r, ics, RepairConfig(domain=DomainDeclaration.finite("abc")))}
    naive_oracle = enumerate_answer_sets_naive(run.ground)
    spurious = len(projections - genuine)
    detail = f"naive: {len(genuine & projections)} repairs + {spurious} spurious, oracle {len(naive_oracle)} answer sets"
    ok = genuine <= projections and spurious == 6
    check(11, "transitivity: guarded gives 3 repairs, naive gives 3 + 6 spurious", ok, detail)


LABEL_12 = "randomized property suite"


def test_criterion_12a_repairs_match_oracle():
    bad = 0
    for seed in range(CORPUS):
        r, ics, dom = random_bic_instance(random.Random(seed))
        got = {x.instance for x in repairs_of(r, ics, RepairConfig(domain=DomainDeclaration.finite(dom)))}
        bad += got != {x.instance for x in enumerate_repairs_bruteforce(r, ics, dom)}
    check(12, LABEL_12, bad == 0, f"(a) {bad}/{CORPUS} repair mismatches")


def test_criterion_12b_solver_matches_oracle():
    bad = 0
    for seed in range(CORPUS):
        e_mode = seed % 2 == 1
        rules = random_ground_program(random.Random(seed), defaults=e_mode)
        try:
            got = set(answer_sets(rules, e_mode=e_mode))
        except InconsistentProgram:
            got = set()
        bad += got != set(enumerate_answer_sets_naive(rules, e_mode=e_mode))
    check(12, LABEL_12, bad == 0, f"(b) {bad}/{CORPUS} answer-set mismatches")


def _corpus(gen):
    for seed in range(CORPUS):
        r, ics, dom = gen(random.Random(seed))
        g = ground(repair_program(ics, r.schema), r, DomainDeclaration.finite(dom))
        yield r, ics, dom, g, answer_sets(g)


def test_criterion_12c_wfs_below_core():
    bad = 0
    for gen in (random_bic_instance, random_fd_unary_instance):
        for _, _, _, g, sets in _corpus(gen):
            w = well_founded(g)
            bad += not (w.true <= core(sets) and all(not (w.false & s) for s in sets))
    check(12, LABEL_12, bad == 0, f"(c) {bad} runs with W outside the core")


def test_criterion_12d_fd_unary_core():
    bad = late = 0
    for _, _, _, g, sets in _corpus(random_fd_unary_instance):
        w = well_founded(g)
        c = primed_projection(core(sets))
        bad += c != primed_projection(w.true)
        late += not c <= w.up_to(3)
    check(12, LABEL_12, bad == 0 and late == 0, f"(d) {bad} core mismatches, {late} beyond three rounds")


def test_criterion_12e_answer_sets_are_models():
    bad = 0
    for _, _, _, g, sets in _corpus(random_bic_instance):
        for s in sets:
            consistent = all(l.atom.pred == "dom" or (l.atom, not l.neg) not in {(m.atom, m.neg) for m in s}
                             for l in s)
            bad += not (consistent and all(satisfies_rule(rule, s) for rule in g.rules))
    check(12, LABEL_12, bad == 0, f"(e) {bad} answer sets failing a rule")


def test_criterion_12f_projections_satisfy_constraints():
    bad = 0
    for r, ics, dom, _, sets in _corpus(random_bic_instance):
        bad += sum(not satisfies(project_repair(s, r).instance, ics, dom) for s in sets)
    check(12, LABEL_12, bad == 0, f"(f) {bad} inconsistent projections")


def test_criterion_12g_dalal_is_min_cardinality():
    bad = 0
    for seed in range(CORPUS):
        r, ics, dom = random_bic_instance(random.Random(seed))
        d = DomainDeclaration.finite(dom)
        win = repairs_of(r, ics, RepairConfig(domain=d))
        best = min(x.distance for x in win)
        dalal = {x.instance for x in repairs_of(r, ics, RepairConfig(RepairMode.DALAL, domain=d))}
        bad += dalal != {x.instance for x in win if x.distance == best}
    check(12, LABEL_12, bad == 0, f"(g) {bad} dalal mismatches")

