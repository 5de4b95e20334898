"""Answer sets of ground extended disjunctive programs.

Search starts from the well-founded bounds, branches on the first undecided
literal in canonical order and propagates rule, support and consistency
consequences.  Every total candidate is checked for minimality against the
reduct.  Defaults (``RuleKind.PERSISTENCE_DEFAULT``) are searched in their
rule form ``L <- B, not ~L``; the literal e-answer reduct is used for the
final self-check.
"""
from __future__ import annotations

import os
from typing import Iterable, Optional

from . import kernels
from .errors import InconsistentProgram, ResourceLimitExceeded
from .model import AnswerSet, BodyLiteral, Rule, RuleKind, complement

DEFAULT_MAX_BRANCHES = 200_000


def default_max_branches() -> int:
    raw = os.environ.get("REPAIRLP_MAX_BRANCHES")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_MAX_BRANCHES


def reduct(rules: Iterable[Rule], s, e_mode: bool = False) -> list:
    """Positive program obtained from ``rules`` relative to the candidate ``s``."""
    out = []
    for r in rules:
        if r.kind is RuleKind.WEAK_CONSTRAINT:
            continue
        if any(b.naf and b.lit in s for b in r.body):
            continue
        if e_mode and r.kind is RuleKind.PERSISTENCE_DEFAULT and any(complement(h) in s for h in r.head):
            continue
        body = tuple(b for b in r.body if not b.naf)
        out.append(Rule(r.head, body, r.kind if r.kind is not RuleKind.PERSISTENCE_DEFAULT else RuleKind.AUX))
    return out


def _rules_of(g):
    return list(g.rules) if hasattr(g, "rules") else list(g)


def minimal_models(rules: Iterable[Rule], within=None, max_branches: Optional[int] = None) -> set:
    """All consistent subset-minimal models of a program without default negation."""
    rules = [r for r in _rules_of(rules) if r.kind is not RuleKind.WEAK_CONSTRAINT]
    if any(b.naf for r in rules for b in r.body):
        raise ValueError("minimal_models expects a program without 'not'")
    enc = kernels.Encoded(rules, within or ())
    init = [kernels.UNK] * enc.n
    if within is not None:
        inside = set(within)
        for i, l in enumerate(enc.literals):
            if l not in inside:
                init[i] = kernels.FALSE
    models, _, exceeded = kernels.backend.enumerate_models(enc, init, _limit(max_branches), 0)
    if exceeded:
        raise ResourceLimitExceeded("branch limit exceeded while enumerating minimal models")
    return {AnswerSet(enc.decode(m)) for m in models}


def _limit(max_branches):
    return default_max_branches() if max_branches is None else max_branches


def search_rules(rules: Iterable[Rule], e_mode: bool) -> list:
    """Rules handed to the search: defaults rewritten into rules, weak constraints removed."""
    out = []
    for r in rules:
        if r.kind is RuleKind.WEAK_CONSTRAINT:
            continue
        if e_mode and r.kind is RuleKind.PERSISTENCE_DEFAULT:
            (h,) = r.head
            r = Rule(r.head, r.body + (BodyLiteral(complement(h), True),), RuleKind.PERSISTENCE_RULE)
        out.append(r)
    return out


def is_strong(r: Rule) -> bool:
    return not r.head and r.kind is not RuleKind.WEAK_CONSTRAINT


class SolveStats:
    def __init__(self):
        self.branches = 0
        self.candidates = 0


def answer_sets(g, e_mode: bool = False, strong: bool = True, max_branches: Optional[int] = None,
                self_check: bool = True, stats: Optional[SolveStats] = None) -> list:
    """Consistent answer sets of ``g`` in canonical order.

    ``strong=False`` ignores headless rules so they can be applied later with
    :func:`filter_strong`.  Raises :class:`InconsistentProgram` when the only
    answer set would be the set of all literals.
    """
    all_rules = _rules_of(g)
    rules = search_rules(all_rules, e_mode)
    if not strong:
        rules = [r for r in rules if not is_strong(r)]
    universe = getattr(g, "universe", ())
    enc = kernels.Encoded(rules, universe)
    val, _, consistent = kernels.backend.well_founded(enc)
    models = []
    if consistent:
        found, branches, exceeded = kernels.backend.enumerate_models(enc, val, _limit(max_branches), 0)
        if stats is not None:
            stats.branches += branches
            stats.candidates += len(found)
        if exceeded:
            raise ResourceLimitExceeded(f"branch limit of {_limit(max_branches)} exceeded")
        models = [AnswerSet(enc.decode(m)) for m in found]
    if not models:
        _check_inconsistent(rules, e_mode, max_branches)
        return []
    if self_check:
        check_rules = [r for r in all_rules if strong or not is_strong(r)]
        for s in models:
            if s not in minimal_models(reduct(check_rules, s, e_mode), within=s, max_branches=max_branches):
                raise AssertionError(f"self-check failed: {s} is not a minimal model of its reduct")
    return sorted(models, key=lambda s: [l.sort_key() for l in s.sorted()])


def _check_inconsistent(rules, e_mode, max_branches):
    certain = [r for r in rules if r.head and not any(b.naf for b in r.body)
               and not (e_mode and r.kind is RuleKind.PERSISTENCE_RULE)]
    enc = kernels.Encoded(certain)
    found, _, exceeded = kernels.backend.enumerate_models(enc, [kernels.UNK] * enc.n, _limit(max_branches), 1)
    if not found and not exceeded:
        raise InconsistentProgram("the program has no consistent answer set; its only answer set is the set of all literals")


def body_holds(r: Rule, s) -> bool:
    for b in r.body:
        if (b.lit in s) == b.naf:
            return False
    return True


def satisfies_rule(r: Rule, s) -> bool:
    return not body_holds(r, s) or any(h in s for h in r.head)


def filter_strong(sets, denials: Iterable[Rule]) -> list:
    denials = [d for d in denials if is_strong(d)]
    return [s for s in sets if not any(body_holds(d, s) for d in denials)]


def weak_violations(s, weak: Iterable[Rule]) -> int:
    return sum(1 for w in weak if w.kind is RuleKind.WEAK_CONSTRAINT and body_holds(w, s))


def optimize_weak(sets, weak: Iterable[Rule]) -> list:
    """Keep the sets violating the fewest ground weak constraints."""
    sets = list(sets)
    weak = [w for w in weak if w.kind is RuleKind.WEAK_CONSTRAINT]
    if not weak or not sets:
        return sets
    counts = [weak_violations(s, weak) for s in sets]
    best = min(counts)
    return [s for s, c in zip(sets, counts) if c == best]


__all__ = [
    "reduct", "minimal_models", "answer_sets", "filter_strong", "optimize_weak", "weak_violations",
    "body_holds", "satisfies_rule", "search_rules", "default_max_branches", "SolveStats",
]
