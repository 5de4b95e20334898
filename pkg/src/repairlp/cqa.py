"""Repairs and consistent query answers on top of the solver."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .compiler import (
    QUERY_PRED,
    RepairMode,
    RicPolicy,
    StabilizerPolicy,
    compile_query_program,
    compile_strong_constraints,
    repair_program,
)
from .errors import NoAdmissibleRepair, UnsafeError
from .grounder import ACTIVE, DomainDeclaration, GroundProgram, active_domain, ground
from .model import (
    NULL,
    Constraint,
    DatabaseInstance,
    Program,
    QAnd,
    QAtom,
    QExists,
    QK,
    QNot,
    QOr,
    Repair,
    RuleKind,
    Var,
    compare_terms,
    contains_k,
    free_vars,
    term_key,
)
from .solver import answer_sets, filter_strong, optimize_weak
from .wfs import well_founded


@dataclass(frozen=True)
class RepairConfig:
    mode: RepairMode = RepairMode.WINSLETT
    policy: StabilizerPolicy = StabilizerPolicy.GUARDED
    ric_policy: RicPolicy = RicPolicy.NULL_INSERTION
    domain: DomainDeclaration = ACTIVE
    max_branches: Optional[int] = None


DEFAULT_CONFIG = RepairConfig()


@dataclass(frozen=True)
class CqaResult:
    answers: frozenset
    certified_exact: bool
    repairs_count: int
    variables: tuple = ()

    @property
    def truth(self) -> bool:
        """Truth value of a closed query."""
        return () in self.answers

    def sorted_answers(self) -> list:
        return sorted(self.answers, key=lambda t: tuple(term_key(x) for x in t))


@dataclass
class Run:
    """Everything one pass of the pipeline produced."""

    program: Program
    ground: GroundProgram
    all_sets: list
    sets: list
    repairs: list = field(default_factory=list)


def project_repair(s, r: DatabaseInstance, mode: RepairMode = RepairMode.WINSLETT) -> Repair:
    schema = r.schema
    facts = {l.atom.unprime() for l in s if l.atom.primed and not l.neg and l.atom.pred in schema}
    if mode is RepairMode.DALAL:
        deleted = {l.atom.unprime() for l in s if l.atom.primed and l.neg}
        facts |= {a for a in r.facts if a not in deleted}
    return Repair.between(r, r.with_facts(facts))


def _split_extra(extra) -> tuple:
    if extra is None:
        return [], []
    rules = list(extra)
    denials = [r for r in rules if not r.head and r.kind is not RuleKind.WEAK_CONSTRAINT]
    defs = [r for r in rules if r.head]
    return defs, denials


def run_pipeline(r: DatabaseInstance, ics, config: RepairConfig = DEFAULT_CONFIG, extra=None,
                 query_program: Optional[Program] = None, q=None) -> Run:
    """compile, ground, solve, filter strong constraints, optimise weak ones."""
    ics = list(ics)
    prog = repair_program(ics, r.schema, config.mode, config.policy, config.ric_policy)
    defs, denials = _split_extra(extra)
    prog = prog + defs + compile_strong_constraints(denials)
    if query_program is not None:
        prog = prog + query_program
    g = ground(prog, r, config.domain, ics, q)
    e_mode = config.mode is RepairMode.RAW_DEFAULTS
    all_sets = answer_sets(g, e_mode=e_mode, strong=False, max_branches=config.max_branches)
    sets = filter_strong(all_sets, g.strong)
    if config.mode is RepairMode.DALAL:
        sets = optimize_weak(sets, g.weak)
    if not sets:
        raise NoAdmissibleRepair(f"{len(all_sets)} answer set(s) found, none admissible")
    run = Run(prog, g, all_sets, sets)
    seen = {}
    for s in sets:
        rep = project_repair(s, r, config.mode)
        seen.setdefault(rep.instance, rep)
    run.repairs = sorted(seen.values(), key=_repair_key)
    return run


def _repair_key(rep: Repair):
    return (rep.distance, [a.sort_key() for a in rep.instance])


def repairs_of(r: DatabaseInstance, ics, config: RepairConfig = DEFAULT_CONFIG, extra=None) -> list:
    return run_pipeline(r, ics, config, extra).repairs


def _query_pred(r: DatabaseInstance) -> str:
    return QUERY_PRED if QUERY_PRED not in r.schema else "aux_" + QUERY_PRED


def _basic(q):
    if isinstance(q, QK):
        q = q.body
    if contains_k(q):
        raise ValueError("expected a basic query without K")
    return q


def consistent_answers(q, r: DatabaseInstance, ics, config: RepairConfig = DEFAULT_CONFIG,
                       extra=None) -> CqaResult:
    """Tuples answering ``q`` in every repair, by intersecting answer sets."""
    q = _basic(q)
    pred = _query_pred(r)
    qprog, variables = compile_query_program(q, config.mode, r.schema, pred)
    run = run_pipeline(r, ics, config, extra, qprog, q)
    answers = None
    for s in run.sets:
        ext = {l.atom.args for l in s if l.atom.pred == pred and not l.atom.primed and not l.neg}
        answers = ext if answers is None else answers & ext
    return CqaResult(frozenset(answers or ()), True, len(run.repairs), variables)


def _fd_unary_only(ics) -> bool:
    return all(c.is_fd or c.is_unary for c in ics)


def _plain_conjunctive(q) -> bool:
    parts = q.parts if isinstance(q, QAnd) else (q,)
    return all(isinstance(p, QAtom) and not p.atom.is_builtin for p in parts)


def wfs_consistent_answers(q, r: DatabaseInstance, ics, config: RepairConfig = DEFAULT_CONFIG) -> CqaResult:
    """Answers read off the true part of the well-founded interpretation."""
    q = _basic(q)
    ics = list(ics)
    pred = _query_pred(r)
    qprog, variables = compile_query_program(q, config.mode, r.schema, pred)
    prog = repair_program(ics, r.schema, config.mode, config.policy, config.ric_policy) + qprog
    g = ground(prog, r, config.domain, ics, q)
    w = well_founded(g, e_mode=config.mode is RepairMode.RAW_DEFAULTS)
    answers = frozenset(l.atom.args for l in w.true if l.atom.pred == pred and not l.atom.primed and not l.neg)
    exact = _fd_unary_only(ics) and _plain_conjunctive(q) and config.mode is RepairMode.WINSLETT
    return CqaResult(answers, exact, 0, variables)


# ---------------------------------------------------------------------------
# K-queries

def _outer_safe(q) -> set:
    if isinstance(q, QK):
        return set(free_vars(q.body))
    if isinstance(q, QAtom):
        return set() if q.atom.is_builtin else q.atom.variables()
    if isinstance(q, QAnd):
        out = set()
        for p in q.parts:
            out |= _outer_safe(p)
        return out
    if isinstance(q, QOr):
        return set.intersection(*(_outer_safe(p) for p in q.parts))
    if isinstance(q, QNot):
        return set()
    if isinstance(q, QExists):
        return _outer_safe(q.body) - set(q.variables)
    raise TypeError(f"not a query node: {q!r}")


def _collect_k(q, out):
    if isinstance(q, QK):
        out.append(q)
    elif isinstance(q, (QAnd, QOr)):
        for p in q.parts:
            _collect_k(p, out)
    elif isinstance(q, (QNot, QExists)):
        _collect_k(q.body, out)


def evaluate_k_query(q, r: DatabaseInstance, ics, config: RepairConfig = DEFAULT_CONFIG, extra=None) -> CqaResult:
    """Evaluate a first-order combination of K-subqueries over the active domain."""
    if not contains_k(q):
        q = QK(q)
    if isinstance(q, QK):
        return consistent_answers(q, r, ics, config, extra)
    variables = tuple(free_vars(q))
    if not set(variables) <= _outer_safe(q):
        raise UnsafeError("outer query is not range restricted over its K-subqueries")
    nodes: list = []
    _collect_k(q, nodes)
    rels = {}
    count = 0
    for node in nodes:
        if node not in rels:
            res = consistent_answers(node, r, ics, config, extra)
            rels[node] = (tuple(free_vars(node.body)), res.answers)
            count = res.repairs_count
    adom = sorted(active_domain(r, ics, q), key=term_key)

    def value(t, env):
        return env.get(t, t) if isinstance(t, Var) else t

    def holds(node, env) -> bool:
        if isinstance(node, QK):
            vs, ans = rels[node]
            return tuple(env[v] for v in vs) in ans
        if isinstance(node, QAtom):
            a = node.atom
            if a.is_builtin:
                return compare_terms(a.pred, value(a.args[0], env), value(a.args[1], env))
            raise ValueError(f"atom {a} outside K")
        if isinstance(node, QAnd):
            return all(holds(p, env) for p in node.parts)
        if isinstance(node, QOr):
            return any(holds(p, env) for p in node.parts)
        if isinstance(node, QNot):
            return not holds(node.body, env)
        if isinstance(node, QExists):
            vs = node.variables
            for vals in itertools.product(adom, repeat=len(vs)):
                if holds(node.body, {**env, **dict(zip(vs, vals))}):
                    return True
            return False
        raise TypeError(f"not a query node: {node!r}")

    answers = set()
    for vals in itertools.product(adom, repeat=len(variables)):
        if holds(q, dict(zip(variables, vals))):
            answers.add(tuple(vals))
    return CqaResult(frozenset(answers), True, count, variables)


# ---------------------------------------------------------------------------
# direct constraint evaluation

def _join(atoms, facts_by_pred, theta):
    if not atoms:
        yield theta
        return
    a, rest = atoms[0], atoms[1:]
    for row in facts_by_pred.get((a.pred, len(a.args)), ()):
        new = dict(theta)
        ok = True
        for t, v in zip(a.args, row):
            if isinstance(t, Var):
                if v is NULL:
                    ok = False
                    break
                old = new.setdefault(t, v)
                if old != v or type(old) is not type(v):
                    ok = False
                    break
            elif t != v or type(t) is not type(v):
                ok = False
                break
        if ok:
            yield from _join(rest, facts_by_pred, new)


def violations(instance: DatabaseInstance, c: Constraint, domain: Optional[Iterable] = None) -> list:
    """Variable assignments under which ``instance`` violates ``c``."""
    facts = set(instance.facts)
    by_pred: dict = {}
    for f in facts:
        by_pred.setdefault((f.pred, len(f.args)), []).append(f.args)
    dom = sorted(set(domain) if domain is not None else instance.constants() | c.constants(), key=term_key)
    out = []
    if c.existential is not None:
        ex = set(c.existential.variables)
        target = c.existential.target
        for theta in _join(list(c.negatives), by_pred, {}):
            witness = False
            for row in by_pred.get((target.pred, len(target.args)), ()):
                if all(t in ex or (theta.get(t, t) if isinstance(t, Var) else t) == v
                       and type(theta.get(t, t) if isinstance(t, Var) else t) is type(v)
                       for t, v in zip(target.args, row)):
                    witness = True
                    break
            if not witness:
                out.append(theta)
        return out
    for theta in _join(list(c.negatives), by_pred, {}):
        free = sorted({v for a in c.positives for v in a.variables()} - set(theta), key=lambda v: v.name)
        for vals in itertools.product(dom, repeat=len(free)):
            full = {**theta, **dict(zip(free, vals))}
            if any(a.substitute(full) in facts for a in c.positives):
                continue
            if any(compare_terms(b.pred, *(full.get(t, t) if isinstance(t, Var) else t for t in b.args))
                   for b in c.phi):
                continue
            out.append(full)
    return out


def satisfies(instance: DatabaseInstance, ics, domain: Optional[Iterable] = None) -> bool:
    return all(not violations(instance, c, domain) for c in ics)


__all__ = [
    "RepairConfig", "DEFAULT_CONFIG", "CqaResult", "Run", "project_repair", "run_pipeline", "repairs_of",
    "consistent_answers", "wfs_consistent_answers", "evaluate_k_query", "violations", "satisfies",
]
