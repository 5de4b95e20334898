"""Compile constraints, repair semantics and queries into logic programs.

Primed atoms (``Atom.primed``) hold the repaired database; unprimed atoms
hold the original instance.  Every emitted rule is safe: a variable that no
positive body literal binds gets a domain guard ``dom(X)`` (or
``dom_<sort>(X)`` when the schema declares attribute sorts).
"""
from __future__ import annotations

import enum
import itertools
from typing import Iterable, Optional

from .errors import CompileError, UnsafeError
from .model import (
    NULL,
    Atom,
    BodyLiteral,
    Constraint,
    Literal,
    Program,
    QAnd,
    QAtom,
    QExists,
    QK,
    QNot,
    QOr,
    Rule,
    RuleKind,
    Schema,
    Var,
    complement,
    free_vars,
    lit,
)

AUX_PREFIX = "aux_"
QUERY_PRED = "query"


class RepairMode(enum.Enum):
    WINSLETT = "winslett"
    DALAL = "dalal"
    RAW_DEFAULTS = "rawDefaults"


class StabilizerPolicy(enum.Enum):
    NAIVE = "naive"
    GUARDED = "guarded"
    # ablation: drop every stabilizer with more than one head literal
    SINGLETON = "singleton"


class RicPolicy(enum.Enum):
    NULL_INSERTION = "null"
    DELETE_ONLY = "delete"


# ---------------------------------------------------------------------------
# helpers

def _var_sorts(atoms: Iterable[Atom], schema: Optional[Schema]) -> dict:
    sorts: dict = {}
    if schema is None:
        return sorts
    for a in atoms:
        if a.is_builtin or a.pred not in schema:
            continue
        for i, t in enumerate(a.args):
            if isinstance(t, Var) and t not in sorts:
                s = schema.sort_of(a.pred, i)
                if s is not None:
                    sorts[t] = s
    return sorts


def guard_atom(v: Var, sort: Optional[str] = None) -> Atom:
    return Atom(f"dom_{sort}" if sort else "dom", (v,))


def _ordered_vars(literals: Iterable[Literal]) -> list:
    out = []
    for l in literals:
        for t in l.atom.args:
            if isinstance(t, Var) and t not in out:
                out.append(t)
    return out


def make_safe(head, body, kind: RuleKind, sorts: Optional[dict] = None) -> Rule:
    """Build a rule, prefixing domain guards for any variable left unbound."""
    sorts = sorts or {}
    rule = Rule(tuple(head), tuple(body), kind)
    unbound = rule.unsafe_variables()
    if unbound:
        order = _ordered_vars(list(head) + [b.lit for b in body])
        guards = tuple(BodyLiteral(Literal(guard_atom(v, sorts.get(v)))) for v in order if v in unbound)
        rule = Rule(tuple(head), guards + tuple(body), kind)
    rule.check_safe()
    return rule


def _db_literals(c: Constraint) -> list:
    """The constraint's database disjuncts as literals: ``p`` or ``-q``."""
    return [Literal(a) for a in c.positives] + [Literal(a, True) for a in c.negatives]


def _primed(l: Literal) -> Literal:
    return Literal(l.atom.prime(), l.neg)


def _not_phi(c: Constraint) -> tuple:
    # phi is a disjunction of comparisons, so its negation is the conjunction of complements
    return tuple(BodyLiteral(complement(Literal(a))) for a in c.phi)


def _check_universal(c: Constraint):
    if c.existential is not None:
        raise CompileError(f"referential constraint {c} must be compiled with compile_ric")


# ---------------------------------------------------------------------------
# change program

def triggering_rule(c: Constraint, schema: Optional[Schema] = None) -> Rule:
    _check_universal(c)
    lits = _db_literals(c)
    head = [_primed(l) for l in lits]
    body = [BodyLiteral(Literal(l.atom), not l.neg) for l in lits if not l.neg]
    body += [BodyLiteral(Literal(l.atom)) for l in lits if l.neg]
    body += _not_phi(c)
    return make_safe(head, body, RuleKind.TRIGGERING, _var_sorts(c.atoms(), schema))


def _stabilizer(c: Constraint, head_idx, lits, guarded: bool, sorts) -> Rule:
    head = [_primed(lits[i]) for i in head_idx]
    body = []
    if guarded:
        # apply only changes that actually alter the instance
        for i in head_idx:
            l = lits[i]
            body.append(BodyLiteral(Literal(l.atom), naf=not l.neg))
    body += [BodyLiteral(complement(_primed(l))) for i, l in enumerate(lits) if i not in head_idx]
    body += _not_phi(c)
    return make_safe(head, body, RuleKind.STABILIZING, sorts)


def stabilizing_rules(c: Constraint, schema: Optional[Schema] = None) -> list:
    """One stabilizer per database literal: the others in the head, its primed complement in the body."""
    _check_universal(c)
    lits = _db_literals(c)
    sorts = _var_sorts(c.atoms(), schema)
    if len(lits) == 1:
        head = [_primed(lits[0])]
        return [make_safe(head, _not_phi(c), RuleKind.STABILIZING, sorts)]
    n = len(lits)
    return [_stabilizer(c, tuple(i for i in range(n) if i != j), lits, False, sorts) for j in range(n)]


def expand_universal(c: Constraint, policy: StabilizerPolicy = StabilizerPolicy.GUARDED,
                     schema: Optional[Schema] = None) -> list:
    """Stabilizers for every nonempty proper subset of the database literals."""
    _check_universal(c)
    lits = _db_literals(c)
    n = len(lits)
    if n < 2:
        raise CompileError("expand_universal needs at least two database literals")
    sorts = _var_sorts(c.atoms(), schema)
    max_head = 1 if policy is StabilizerPolicy.SINGLETON else n - 1
    guarded = policy is StabilizerPolicy.GUARDED and n > 2
    rules = []
    for k in range(1, max_head + 1):
        for head_idx in itertools.combinations(range(n), k):
            rules.append(_stabilizer(c, head_idx, lits, guarded, sorts))
    return rules


def build_change_program(ics: Iterable[Constraint], schema: Optional[Schema] = None,
                         policy: StabilizerPolicy = StabilizerPolicy.GUARDED) -> Program:
    rules = []
    for c in ics:
        _check_universal(c)
        rules.append(triggering_rule(c, schema))
        if c.size <= 2:
            stab = stabilizing_rules(c, schema)
            assert all(len(r.head) == 1 for r in stab)
            rules += stab
        elif policy is StabilizerPolicy.SINGLETON:
            rules += expand_universal(c, policy, schema)
        elif policy is StabilizerPolicy.NAIVE:
            rules += stabilizing_rules(c, schema) + expand_universal(c, policy, schema)
        else:
            rules += expand_universal(c, policy, schema)
    return Program(rules)


# ---------------------------------------------------------------------------
# persistence

def _pred_vars(arity: int) -> tuple:
    return tuple(Var(f"X{i + 1}") for i in range(arity))


def persistence_rules(schema: Schema, mode: RepairMode) -> list:
    rules = []
    for name, sig in schema.items():
        xs = _pred_vars(sig.arity)
        sorts = {v: s for v, s in zip(xs, sig.sorts or ()) if s}
        p, pp = Atom(name, xs), Atom(name, xs, True)
        if mode is RepairMode.WINSLETT:
            rules.append(make_safe([Literal(pp)], [BodyLiteral(Literal(p)), BodyLiteral(Literal(pp, True), True)],
                                   RuleKind.PERSISTENCE_RULE, sorts))
            rules.append(make_safe([Literal(pp, True)], [BodyLiteral(Literal(p), True), BodyLiteral(Literal(pp), True)],
                                   RuleKind.PERSISTENCE_RULE, sorts))
        elif mode is RepairMode.RAW_DEFAULTS:
            rules.append(make_safe([Literal(pp)], [BodyLiteral(Literal(p))], RuleKind.PERSISTENCE_DEFAULT, sorts))
            rules.append(make_safe([Literal(pp, True)], [BodyLiteral(Literal(p), True)],
                                   RuleKind.PERSISTENCE_DEFAULT, sorts))
        else:
            rules.append(Rule((), (BodyLiteral(Literal(pp)), BodyLiteral(Literal(p), True)), RuleKind.WEAK_CONSTRAINT))
            rules.append(Rule((), (BodyLiteral(Literal(pp, True)), BodyLiteral(Literal(p))), RuleKind.WEAK_CONSTRAINT))
    return rules


def add_persistence(p: Program, schema: Schema, mode: RepairMode) -> Program:
    return p + persistence_rules(schema, mode)


def defaults_to_rules(p: Program) -> Program:
    """Rewrite each persistence default ``L <- B`` into ``L <- B, not ~L``."""
    out = []
    for r in p:
        if r.kind is RuleKind.PERSISTENCE_DEFAULT:
            (h,) = r.head
            out.append(Rule(r.head, r.body + (BodyLiteral(complement(h), True),), RuleKind.PERSISTENCE_RULE))
        else:
            out.append(r)
    return Program(out, p.domain)


# ---------------------------------------------------------------------------
# referential constraints

def compile_ric(c: Constraint, policy: RicPolicy = RicPolicy.NULL_INSERTION,
                schema: Optional[Schema] = None, tag: str = "0") -> list:
    """Rules for ``P(X) -> exists Y R(X,Y)``; null fills the existential positions."""
    if c.existential is None:
        raise CompileError(f"{c} has no existential tail")
    if len(c.negatives) != 1 or c.positives or c.phi:
        raise CompileError("only the single-tail form 'P(X) -> exists Y R(X,Y)' is supported")
    src = c.negatives[0]
    target = c.existential.target
    ex = set(c.existential.variables)
    shared = []
    for t in target.args:
        if isinstance(t, Var) and t not in ex and t not in shared:
            shared.append(t)
    shared = tuple(shared)
    sorts = _var_sorts((src, target), schema)
    aux_name = f"{AUX_PREFIX}ric{tag}_{target.pred}"
    aux, auxp = Atom(aux_name, shared), Atom(aux_name, shared, True)
    null_target = Atom(target.pred, tuple(NULL if t in ex else t for t in target.args), True)
    P, Pp = Literal(src), Literal(src.prime())
    rules = [make_safe([Literal(aux)], [BodyLiteral(Literal(target))], RuleKind.AUX, sorts)]
    aux_prime_def = make_safe([Literal(auxp)], [BodyLiteral(Literal(target.prime()))], RuleKind.AUX, sorts)
    if policy is RicPolicy.DELETE_ONLY:
        rules.append(make_safe([complement(Pp)], [BodyLiteral(P), BodyLiteral(Literal(aux), True)],
                               RuleKind.TRIGGERING, sorts))
        rules.append(aux_prime_def)
        rules.append(make_safe([complement(Pp)], [BodyLiteral(Literal(auxp), True)], RuleKind.STABILIZING, sorts))
        return rules
    rules.append(make_safe([complement(Pp), Literal(null_target)], [BodyLiteral(P), BodyLiteral(Literal(aux), True)],
                           RuleKind.TRIGGERING, sorts))
    rules.append(aux_prime_def)
    rules.append(make_safe([complement(Pp)],
                           [BodyLiteral(Literal(auxp), True), BodyLiteral(Literal(null_target, True))],
                           RuleKind.STABILIZING, sorts))
    rules.append(make_safe([Literal(null_target)], [BodyLiteral(Pp), BodyLiteral(Literal(auxp), True)],
                           RuleKind.STABILIZING, sorts))
    return rules


# ---------------------------------------------------------------------------
# queries

class _QueryCompiler:
    def __init__(self, mode: RepairMode, schema: Optional[Schema]):
        self.mode = mode
        self.schema = schema
        self.rules: list = []
        self.fresh = 0
        self.sorts: dict = {}

    def new_var(self, v: Var) -> Var:
        self.fresh += 1
        return Var(f"{v.name}_{self.fresh}")

    def new_aux(self) -> str:
        self.fresh += 1
        return f"{AUX_PREFIX}q{self.fresh}"

    def guards(self, variables) -> list:
        return [BodyLiteral(Literal(guard_atom(v, self.sorts.get(v)))) for v in variables]

    def atom_alts(self, a: Atom, negated: bool) -> list:
        if a.is_builtin:
            return [[BodyLiteral(lit(a, negated))]]
        vs = _ordered_vars([Literal(a)])
        pp = a.prime()
        if self.mode is RepairMode.DALAL:
            if not negated:
                return [[BodyLiteral(Literal(pp))], [BodyLiteral(Literal(a)), BodyLiteral(Literal(pp, True), True)]]
            return [[BodyLiteral(Literal(pp, True))],
                    self.guards(vs) + [BodyLiteral(Literal(a), True), BodyLiteral(Literal(pp), True)]]
        if not negated:
            return [[BodyLiteral(Literal(pp))]]
        return [self.guards(vs) + [BodyLiteral(Literal(pp), True)]]

    def alts(self, q) -> list:
        """Alternative bodies (a disjunction of conjunctions) equivalent to ``q``."""
        if isinstance(q, QAtom):
            return self.atom_alts(q.atom, False)
        if isinstance(q, QAnd):
            out = [[]]
            for part in q.parts:
                out = [a + b for a in out for b in self.alts(part)]
            return out
        if isinstance(q, QOr):
            return [alt for part in q.parts for alt in self.alts(part)]
        if isinstance(q, QExists):
            theta = {v: self.new_var(v) for v in q.variables}
            return self.alts(_rename(q.body, theta))
        if isinstance(q, QNot):
            body = q.body
            if isinstance(body, QAtom):
                return self.atom_alts(body.atom, True)
            if isinstance(body, QNot):
                return self.alts(body.body)
            vs = tuple(free_vars(body))
            name = self.new_aux()
            head = Atom(name, vs)
            for alt in self.alts(body):
                self.rules.append(make_safe([Literal(head)], alt, RuleKind.AUX, self.sorts))
            return [self.guards(vs) + [BodyLiteral(Literal(head), True)]]
        if isinstance(q, QK):
            raise CompileError("K may not occur inside a basic query")
        raise TypeError(f"not a query node: {q!r}")


def _rename(q, theta):
    if isinstance(q, QAtom):
        return QAtom(q.atom.substitute(theta))
    if isinstance(q, QAnd):
        return QAnd(tuple(_rename(p, theta) for p in q.parts))
    if isinstance(q, QOr):
        return QOr(tuple(_rename(p, theta) for p in q.parts))
    if isinstance(q, QNot):
        return QNot(_rename(q.body, theta))
    if isinstance(q, QExists):
        inner = {k: v for k, v in theta.items() if k not in q.variables}
        return QExists(q.variables, _rename(q.body, inner))
    if isinstance(q, QK):
        return QK(_rename(q.body, theta))
    raise TypeError(f"not a query node: {q!r}")


def _query_sorts(q, schema):
    from .model import query_atoms
    return _var_sorts(query_atoms(q), schema)


def compile_query_program(q, mode: RepairMode = RepairMode.WINSLETT, schema: Optional[Schema] = None,
                          pred: str = QUERY_PRED):
    """Stratified program defining ``pred`` over the free variables of ``q``.

    Returns ``(program, answer_variables)``.
    """
    if isinstance(q, QK):
        q = q.body
    qc = _QueryCompiler(mode, schema)
    qc.sorts = _query_sorts(q, schema)
    answer = tuple(free_vars(q))
    head = Literal(Atom(pred, answer))
    for alt in qc.alts(q):
        rule = Rule((head,), tuple(alt), RuleKind.QUERY)
        if rule.unsafe_variables() & set(answer):
            raise UnsafeError(f"unsafe query: answer variable not bound in {rule}")
        qc.rules.append(make_safe([head], alt, RuleKind.QUERY, qc.sorts))
    return Program(qc.rules), answer


def compile_strong_constraints(denials: Iterable[Rule]) -> Program:
    out = []
    for d in denials:
        if d.head:
            raise CompileError(f"strong constraint {d} has a nonempty head")
        d.check_safe()
        out.append(Rule((), d.body, RuleKind.STRONG_CONSTRAINT) if d.kind is not RuleKind.STRONG_CONSTRAINT else d)
    return Program(out)


# ---------------------------------------------------------------------------

def repair_program(ics: Iterable[Constraint], schema: Schema, mode: RepairMode = RepairMode.WINSLETT,
                   policy: StabilizerPolicy = StabilizerPolicy.GUARDED,
                   ric_policy: RicPolicy = RicPolicy.NULL_INSERTION) -> Program:
    """The full repair program: change rules, referential rules and persistence."""
    ics = list(ics)
    universal = [c for c in ics if c.existential is None]
    rics = [c for c in ics if c.existential is not None]
    prog = build_change_program(universal, schema, policy)
    for i, c in enumerate(rics):
        prog = prog + compile_ric(c, ric_policy, schema, tag=str(i))
    if mode is RepairMode.DALAL and rics:
        # referential stabilizers read the complete primed relation
        prog = prog + persistence_rules(schema, RepairMode.WINSLETT)
    return add_persistence(prog, schema, mode)


def dependency_graph(p: Program) -> dict:
    """Predicate dependency edges ``head -> {(body_pred, negative)}``."""
    g: dict = {}
    for r in p:
        for h in r.head:
            key = (h.atom.pred, h.atom.primed)
            for b in r.body:
                if b.lit.atom.is_builtin:
                    continue
                g.setdefault(key, set()).add(((b.lit.atom.pred, b.lit.atom.primed), b.naf))
    return g


def is_stratified(p: Program) -> bool:
    """No cycle through a negative edge in the predicate dependency graph."""
    g = dependency_graph(p)
    nodes = set(g) | {t for es in g.values() for t, _ in es}
    reach = {n: set() for n in nodes}
    for n in nodes:
        stack = [n]
        while stack:
            m = stack.pop()
            for t, _ in g.get(m, ()):
                if t not in reach[n]:
                    reach[n].add(t)
                    stack.append(t)
    for h, es in g.items():
        for t, negative in es:
            if negative and h in reach.get(t, set()) | ({t} if t == h else set()):
                return False
    return True
