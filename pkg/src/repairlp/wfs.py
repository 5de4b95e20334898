"""Disjunctive well-founded interpretation and the core of a ground program.

``well_founded`` iterates ``I -> (T(I), GUS(I))`` from the empty
interpretation through the search kernel.  ``t_operator`` and
``greatest_unfounded_set`` are literal-level reference versions of the two
halves of one step.
"""
from __future__ import annotations

from typing import Iterable

from . import kernels
from .errors import InconsistentProgram
from .model import RuleKind, ThreeValuedInterpretation, complement
from .solver import search_rules


def _proper(g):
    rules = list(g.rules) if hasattr(g, "rules") else list(g)
    return [r for r in rules if r.head and r.kind is not RuleKind.WEAK_CONSTRAINT]


def _universe(g, rules):
    uni = set(getattr(g, "universe", ()))
    for r in rules:
        uni.update(r.head)
        uni.update(b.lit for b in r.body)
    return uni | {complement(l) for l in uni}


def t_operator(g, i: ThreeValuedInterpretation) -> set:
    """Head literals whose rule body is true and whose head-mates are all false in ``i``."""
    out = set()
    for r in _proper(g):
        if not all((b.lit in i.false) if b.naf else (b.lit in i.true) for b in r.body):
            continue
        for h in r.head:
            if all(o in i.false for o in r.head if o != h):
                out.add(h)
    return out


def greatest_unfounded_set(g, i: ThreeValuedInterpretation) -> set:
    """Greatest set of literals that no rule can found relative to ``i``."""
    rules = _proper(g)
    x = {l for l in _universe(g, rules) if l not in i.true}
    changed = True
    while changed:
        changed = False
        for r in rules:
            if any(b.naf and b.lit in i.true for b in r.body):
                continue
            if any(not b.naf and (b.lit in i.false or b.lit in x) for b in r.body):
                continue
            if any(h in i.true for h in r.head):
                continue
            founded = [h for h in r.head if h in x]
            if founded:
                x.difference_update(founded)
                changed = True
    return x


def well_founded(g, e_mode: bool = False, backend=None) -> ThreeValuedInterpretation:
    """The well-founded fixpoint; ``entered`` maps each decided literal to its first round."""
    rules = search_rules(_proper(g), e_mode)
    enc = kernels.Encoded(rules, getattr(g, "universe", ()))
    k = backend or kernels.backend
    val, entered, consistent = k.well_founded(enc)
    if not consistent:
        raise InconsistentProgram("the well-founded interpretation contains complementary literals")
    true = frozenset(l for l, v in zip(enc.literals, val) if v == kernels.TRUE)
    false = frozenset(l for l, v in zip(enc.literals, val) if v == kernels.FALSE)
    ent = {l: e for l, e in zip(enc.literals, entered) if e}
    return ThreeValuedInterpretation(true, false, frozenset(enc.literals), ent)


def core(sets: Iterable) -> frozenset:
    sets = list(sets)
    if not sets:
        raise ValueError("the core of an empty collection of answer sets is undefined")
    out = frozenset(sets[0])
    for s in sets[1:]:
        out &= s
    return out


def primed_projection(literals) -> frozenset:
    """Literals over primed predicates only, dropping facts and guards."""
    return frozenset(l for l in literals if l.atom.primed)


__all__ = ["t_operator", "greatest_unfounded_set", "well_founded", "core", "primed_projection"]
