"""Grounding of safe programs over a finite domain.

Rules are instantiated by joining their positive body literals against an
over-approximation of the derivable literals, which yields the same answer
sets as substituting every domain constant for every variable while keeping
the ground program small.  Comparisons are evaluated away and literals over
fact-only predicates are partially evaluated.  ``simplify=False`` skips all
of that and substitutes exhaustively; it exists to cross-check the
simplifications.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import GroundingError, UnsafeError
from .model import (
    NULL,
    Atom,
    DatabaseInstance,
    Literal,
    Program,
    Rule,
    RuleKind,
    Var,
    compare_terms,
    complement,
    query_atoms,
    term_key,
)


@dataclass(frozen=True)
class DomainDeclaration:
    kind: str = "active"
    constants: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("active", "finite"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "constants", frozenset(self.constants))
        if NULL in self.constants:
            raise ValueError("null cannot be a domain constant")
        if self.kind == "finite" and not self.constants:
            raise ValueError("a declared finite domain must be nonempty")

    @classmethod
    def finite(cls, constants: Iterable) -> "DomainDeclaration":
        return cls("finite", frozenset(constants))


ACTIVE = DomainDeclaration()


def _consts(atoms) -> set:
    return {t for a in atoms for t in a.args if not isinstance(t, Var) and t is not NULL}


def active_domain(r: DatabaseInstance, ics=(), q=None) -> set:
    """Constants of the instance, the constraints and the query."""
    out = set(r.constants())
    for c in ics:
        out |= c.constants()
    if q is not None:
        out |= _consts(query_atoms(q))
    return out


@dataclass
class GroundProgram:
    rules: tuple
    universe: frozenset
    facts: frozenset = frozenset()
    domain: frozenset = frozenset()
    _weak: Optional[tuple] = field(default=None, repr=False)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    @property
    def proper_rules(self) -> tuple:
        return tuple(r for r in self.rules if r.head or r.kind is RuleKind.STRONG_CONSTRAINT)

    @property
    def weak(self) -> tuple:
        return tuple(r for r in self.rules if r.kind is RuleKind.WEAK_CONSTRAINT)

    @property
    def strong(self) -> tuple:
        return tuple(r for r in self.rules if not r.head and r.kind is not RuleKind.WEAK_CONSTRAINT)


def _key(l: Literal):
    return (l.atom.pred, l.atom.primed, l.neg, len(l.atom.args))


def _sorted_domains(program: Program, r: DatabaseInstance, dom: set, declared: bool) -> dict:
    """Constants per attribute sort named by ``dom_<sort>`` guards."""
    wanted = set()
    for rule in program:
        for b in rule.body:
            p = b.lit.atom.pred
            if p.startswith("dom_"):
                wanted.add(p[4:])
    for _, sig in r.schema.items():
        wanted |= {s for s in sig.sorts or () if s}
    if declared:
        return {s: set(dom) for s in wanted}
    out = {s: set() for s in wanted}
    atoms = list(r.facts)
    for rule in program:
        atoms += [l.atom for l in rule.head] + [b.lit.atom for b in rule.body]
    for a in atoms:
        if a.is_builtin or a.pred not in r.schema:
            continue
        for i, t in enumerate(a.args):
            s = r.schema.sort_of(a.pred, i)
            if s and not isinstance(t, Var) and t is not NULL:
                out[s].add(t)
    return out


def _match(args, row, theta):
    new = dict(theta)
    for t, v in zip(args, row):
        if isinstance(t, Var):
            old = new.get(t, _MISSING)
            if old is _MISSING:
                new[t] = v
            elif old != v or type(old) is not type(v):
                return None
        elif t != v or type(t) is not type(v):
            return None
    return new


_MISSING = object()


def _builtin_holds(a: Atom, theta) -> Optional[bool]:
    l, rgt = (theta.get(t, t) if isinstance(t, Var) else t for t in a.args)
    if isinstance(l, Var) or isinstance(rgt, Var):
        return None
    return compare_terms(a.pred, l, rgt)


def _bindings(rule: Rule, index: dict):
    """All substitutions binding the rule's variables by joining its positive literals."""
    positives = [b.lit for b in rule.body if not b.naf and not b.lit.atom.is_builtin]
    builtins = [b.lit.atom for b in rule.body if b.lit.atom.is_builtin]
    results = []

    def rec(theta, remaining, pending):
        still = []
        for a in pending:
            v = _builtin_holds(a, theta)
            if v is False:
                return
            if v is None:
                still.append(a)
        if not remaining:
            if still:
                raise UnsafeError(f"comparison with unbound variables in {rule}")
            results.append(theta)
            return
        # pick the literal with the most bound arguments, then the smallest relation
        def cost(l):
            bound = sum(1 for t in l.atom.args if not isinstance(t, Var) or t in theta)
            return (-bound, len(index.get(_key(l), ())))
        best = min(remaining, key=cost)
        rest = [l for l in remaining if l is not best]
        for row in index.get(_key(best), ()):
            nt = _match(best.atom.args, row, theta)
            if nt is not None:
                rec(nt, rest, still)

    rec({}, positives, builtins)
    return results


def _index(lits) -> dict:
    idx: dict = {}
    for l in lits:
        idx.setdefault(_key(l), set()).add(l.atom.args)
    return idx


def _canonical(rules):
    def rk(r):
        return (tuple(l.sort_key() for l in r.head), tuple(b.sort_key() for b in r.body), r.kind.value)
    return tuple(sorted(rules, key=rk))


def ground(program: Program, r: DatabaseInstance, dom: DomainDeclaration = ACTIVE,
           ics=(), q=None, simplify: bool = True) -> GroundProgram:
    """Ground ``program`` together with facts for ``r`` and the domain guards."""
    if dom.kind == "finite":
        constants = set(dom.constants)
        missing = r.constants() - constants
        if missing:
            raise GroundingError("instance constants outside the declared domain: "
                                 + ", ".join(sorted(map(str, missing))))
    else:
        constants = active_domain(r, ics, q)
        for rule in program:
            constants |= _consts([l.atom for l in rule.head] + [b.lit.atom for b in rule.body])
    for rule in program:
        rule.check_safe()

    facts = {Literal(a) for a in r.facts}
    facts |= {Literal(Atom("dom", (c,))) for c in constants}
    for s, cs in _sorted_domains(program, r, constants, dom.kind == "finite").items():
        facts |= {Literal(Atom(f"dom_{s}", (c,))) for c in cs}
    nonfact_rules = []
    for rule in program:
        if (len(rule.head) == 1 and not rule.body and rule.head[0].atom.is_ground()
                and rule.kind is not RuleKind.PERSISTENCE_DEFAULT):
            facts.add(rule.head[0])
        else:
            nonfact_rules.append(rule)
    facts = frozenset(facts)
    if simplify:
        rules = _ground_smart(nonfact_rules, facts)
    else:
        rules = _ground_exhaustive(nonfact_rules, facts, constants)
    fact_rules = [Rule((l,), (), RuleKind.FACT) for l in facts]
    all_rules = _canonical(set(fact_rules) | set(rules))
    universe = set()
    for rule in all_rules:
        universe.update(rule.head)
        universe.update(b.lit for b in rule.body)
    universe |= {complement(l) for l in universe}
    return GroundProgram(all_rules, frozenset(universe), facts, frozenset(constants))


def _ground_smart(rules, facts):
    head_keys = {_key(l) for rule in rules for l in rule.head}
    possible = set(facts)
    while True:
        index = _index(possible)
        added = False
        instances = []
        for rule in rules:
            for theta in _bindings(rule, index):
                g = rule.substitute(theta)
                instances.append(g)
                for h in g.head:
                    if h not in possible:
                        possible.add(h)
                        added = True
        if not added:
            break
    out = set()
    for g in instances:
        body = []
        keep = True
        for b in g.body:
            l = b.lit
            if l.atom.is_builtin:
                continue  # already checked during the join
            if b.naf:
                if l in facts:
                    keep = False
                    break
                if _key(l) not in head_keys:
                    continue
                body.append(b)
            else:
                if l in facts and _key(l) not in head_keys:
                    continue
                body.append(b)
        if keep:
            out.add(Rule(g.head, tuple(body), g.kind))
    return out


def _ground_exhaustive(rules, facts, constants):
    domain = sorted(constants, key=term_key)
    out = set()
    builtin_facts = set()
    for rule in rules:
        vs = sorted(rule.variables(), key=lambda v: v.name)
        for values in itertools.product(domain, repeat=len(vs)):
            g = rule.substitute(dict(zip(vs, values)))
            for b in g.body:
                a = b.lit.atom
                if a.is_builtin and compare_terms(a.pred, *a.args):
                    builtin_facts.add(b.lit)
            out.add(g)
    out |= {Rule((l,), (), RuleKind.FACT) for l in builtin_facts}
    return out


__all__ = ["DomainDeclaration", "ACTIVE", "GroundProgram", "active_domain", "ground"]
