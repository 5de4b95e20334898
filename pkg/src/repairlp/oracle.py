"""Brute-force reference implementations used to cross-check the solver.

Nothing here shares code with the compiler or the search kernels: repairs
are found by testing every candidate instance against the constraints, and
answer sets by testing every consistent literal set against the reduct.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterable, Optional

import numpy as np

from .errors import ResourceLimitExceeded
from .model import (
    NULL,
    AnswerSet,
    Atom,
    BodyLiteral,
    Constraint,
    DatabaseInstance,
    Literal,
    Repair,
    Rule,
    RuleKind,
    Schema,
    Var,
    builtin,
    compare_terms,
    complement,
    term_key,
)

REPAIR_BOUND = 22
ANSWER_SET_BOUND = 24


# ---------------------------------------------------------------------------
# repairs

def candidate_universe(r: DatabaseInstance, ics, domain: Iterable) -> list:
    """Ground atoms a repair may contain; referential targets only get null witnesses."""
    dom = sorted(set(domain), key=term_key)
    ric_targets = {}
    for c in ics:
        if c.existential is not None:
            ric_targets.setdefault(c.existential.target.pred, []).append(c)
    atoms = set(r.facts)
    for name, sig in r.schema.items():
        if name in ric_targets:
            for c in ric_targets[name]:
                tgt, ex = c.existential.target, set(c.existential.variables)
                free = sorted(tgt.variables() - ex, key=lambda v: v.name)
                for vals in itertools.product(dom, repeat=len(free)):
                    theta = dict(zip(free, vals))
                    atoms.add(Atom(name, tuple(NULL if t in ex else theta.get(t, t) for t in tgt.args)))
            continue
        for args in itertools.product(dom, repeat=sig.arity):
            atoms.add(Atom(name, args))
    return sorted(atoms, key=Atom.sort_key)


def _subst(t, theta):
    return theta.get(t, t) if isinstance(t, Var) else t


def _violation_mask(masks, c: Constraint, bit: dict, dom: list):
    viol = np.zeros(masks.shape, dtype=bool)
    if c.existential is not None:
        src = c.negatives[0]
        tgt, ex = c.existential.target, set(c.existential.variables)
        svars = sorted(src.variables(), key=lambda v: v.name)
        for vals in itertools.product(dom, repeat=len(svars)):
            theta = dict(zip(svars, vals))
            sa = Atom(src.pred, tuple(_subst(t, theta) for t in src.args))
            if sa not in bit:
                continue
            tmask = 0
            for a, b in bit.items():
                if a.pred == tgt.pred and len(a.args) == len(tgt.args) and all(
                        t in ex or (_subst(t, theta) == v and type(_subst(t, theta)) is type(v))
                        for t, v in zip(tgt.args, a.args)):
                    tmask |= 1 << b
            smask = 1 << bit[sa]
            viol |= ((masks & smask) != 0) & ((masks & tmask) == 0)
        return viol
    vs = sorted(c.variables(), key=lambda v: v.name)
    for vals in itertools.product(dom, repeat=len(vs)):
        theta = dict(zip(vs, vals))
        if any(compare_terms(b.pred, *(_subst(t, theta) for t in b.args)) for b in c.phi):
            continue
        pmask = nmask = 0
        skip = False
        for a in c.positives:
            g = Atom(a.pred, tuple(_subst(t, theta) for t in a.args))
            if g in bit:
                pmask |= 1 << bit[g]
        for a in c.negatives:
            g = Atom(a.pred, tuple(_subst(t, theta) for t in a.args))
            if g not in bit:
                skip = True  # this negative atom is false in every candidate
                break
            nmask |= 1 << bit[g]
        if skip:
            continue
        viol |= ((masks & nmask) == nmask) & ((masks & pmask) == 0)
    return viol


def _subset_or(f: np.ndarray, n: int) -> np.ndarray:
    """g[S] = OR of f over all subsets of S."""
    g = f.copy()
    for i in range(n):
        v = g.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    return g


def _proper_subset_or(g: np.ndarray, n: int) -> np.ndarray:
    h = np.zeros_like(g)
    for i in range(n):
        hv = h.reshape(-1, 2, 1 << i)
        gv = g.reshape(-1, 2, 1 << i)
        hv[:, 1, :] |= gv[:, 0, :]
    return h


def enumerate_repairs_bruteforce(r: DatabaseInstance, ics, domain: Optional[Iterable] = None,
                                 metric: str = "setInclusion", bound: int = REPAIR_BOUND) -> list:
    """Repairs by definition: consistent candidates whose difference from ``r`` is minimal."""
    ics = list(ics)
    if domain is None:
        domain = set(r.constants())
        for c in ics:
            domain |= c.constants()
    dom = sorted(set(domain), key=term_key)
    universe = candidate_universe(r, ics, dom)
    n = len(universe)
    if n > bound:
        raise ResourceLimitExceeded(f"candidate universe has {n} atoms, bound is {bound}")
    bit = {a: i for i, a in enumerate(universe)}
    masks = np.arange(1 << n, dtype=np.int64)
    viol = np.zeros(masks.shape, dtype=bool)
    for c in ics:
        viol |= _violation_mask(masks, c, bit, dom)
    rmask = _bits(r.facts, bit)
    consistent_by_delta = ~viol[masks ^ rmask]
    if metric == "setInclusion":
        g = _subset_or(consistent_by_delta, n)
        keep = consistent_by_delta & ~_proper_subset_or(g, n)
    elif metric == "cardinality":
        counts = np.bitwise_count(masks.astype(np.uint64))
        best = counts[consistent_by_delta].min() if consistent_by_delta.any() else 0
        keep = consistent_by_delta & (counts == best)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    out = []
    for d in np.nonzero(keep)[0]:
        m = int(d) ^ rmask
        facts = frozenset(universe[i] for i in range(n) if m >> i & 1)
        out.append(Repair.between(r, r.with_facts(facts)))
    return sorted(out, key=lambda rep: (rep.distance, [a.sort_key() for a in rep.instance]))


# ---------------------------------------------------------------------------
# answer sets

def _literal_universe(rules, universe=()):
    lits = set(universe)
    for rule in rules:
        lits.update(rule.head)
        lits.update(b.lit for b in rule.body)
    lits |= {complement(l) for l in lits}
    return sorted(lits, key=Literal.sort_key)


def _consistent_masks(lits, bit, facts=frozenset()):
    """Bitmasks over ``lits`` with no complementary pair that contain every fact."""
    masks = np.zeros(1, dtype=np.int64)
    seen = set()
    for l in lits:
        if l in seen:
            continue
        c = complement(l)
        seen |= {l, c}
        if l in facts or c in facts:
            masks = masks | (1 << bit[l if l in facts else c])
        else:
            masks = np.concatenate([masks, masks | (1 << bit[l]), masks | (1 << bit[c])])
    return masks


def _bits(lits, bit) -> int:
    m = 0
    for l in lits:
        m |= 1 << bit[l]
    return m


def _enc(rule, bit):
    head = _bits(rule.head, bit)
    pos = _bits((b.lit for b in rule.body if not b.naf), bit)
    neg = _bits((b.lit for b in rule.body if b.naf), bit)
    return head, pos, neg


def enumerate_answer_sets_naive(g, e_mode: bool = False, bound: int = ANSWER_SET_BOUND) -> list:
    """Answer sets by exhaustive candidate checking against the reduct."""
    rules = [r for r in (g.rules if hasattr(g, "rules") else g) if r.kind is not RuleKind.WEAK_CONSTRAINT]
    lits = _literal_universe(rules, getattr(g, "universe", ()))
    facts = {r.head[0] for r in rules if len(r.head) == 1 and not r.body
             and not (e_mode and r.kind is RuleKind.PERSISTENCE_DEFAULT)}
    free = [l for l in lits if l not in facts and complement(l) not in facts]
    if len(free) > bound:
        raise ResourceLimitExceeded(f"{len(free)} undecided literals exceed the bound of {bound}")
    bit = {l: i for i, l in enumerate(lits)}
    enc = [(_enc(r, bit), r.kind is RuleKind.PERSISTENCE_DEFAULT and e_mode) for r in rules]
    comp_bit = {bit[l]: bit[complement(l)] for l in lits}
    cand = _consistent_masks(lits, bit, facts)
    ok = np.ones(cand.shape, dtype=bool)
    # a candidate must be a model of its own reduct; defeated defaults impose nothing
    for (head, pos, neg), is_default in enc:
        fires = ((cand & pos) == pos) & ((cand & neg) == 0) & ((cand & head) == 0)
        if is_default:
            hb = head.bit_length() - 1
            fires &= (cand & (1 << comp_bit[hb])) == 0
        ok &= ~fires
    out = []
    for s in cand[ok]:
        s = int(s)
        red = []
        for (head, pos, neg), is_default in enc:
            if neg & s:
                continue
            if is_default and s >> comp_bit[head.bit_length() - 1] & 1:
                continue
            red.append((head, pos))
        if _is_minimal_bruteforce(s, red):
            out.append(AnswerSet(frozenset(lits[i] for i in range(len(lits)) if s >> i & 1)))
    return sorted(out, key=lambda a: [l.sort_key() for l in a.sorted()])


def _is_minimal_bruteforce(s: int, red) -> bool:
    members = [i for i in range(s.bit_length()) if s >> i & 1]
    k = len(members)
    if k == 0:
        return True
    idx = np.arange(1 << k, dtype=np.int64)
    sub = np.zeros(idx.shape, dtype=np.int64)
    for j, m in enumerate(members):
        sub |= ((idx >> j) & 1) << m
    model = np.ones(sub.shape, dtype=bool)
    for head, pos in red:
        model &= ~(((sub & pos) == pos) & ((sub & head) == 0))
    model[-1] = False  # s itself
    return not model.any()


def s_of(r: DatabaseInstance, rp: DatabaseInstance, domain: Iterable) -> frozenset:
    """Original facts, the primed copy of ``rp`` and primed negations of everything else."""
    dom = sorted(set(domain), key=term_key)
    out = {Literal(a) for a in r.facts}
    out |= {Literal(Atom("dom", (c,))) for c in dom}
    for name, sig in r.schema.items():
        for args in itertools.product(dom, repeat=sig.arity):
            a = Atom(name, args)
            out.add(Literal(a.prime(), a not in rp.facts))
    out |= {Literal(a.prime()) for a in rp.facts}
    return frozenset(out)


def is_model(rules, s) -> bool:
    for r in rules:
        if r.kind is RuleKind.WEAK_CONSTRAINT:
            continue
        if all((b.lit in s) != b.naf for b in r.body) and not any(h in s for h in r.head):
            return False
    return True


# ---------------------------------------------------------------------------
# random corpora

BIC_FAMILIES = ("fd", "inclusion", "range", "exclusion")
X, Y, Z = Var("X"), Var("Y"), Var("Z")


def _vars(n):
    return tuple(Var(f"V{i}") for i in range(n))


def random_bic(rng: random.Random, schema: Schema, family: str, domain: list) -> Optional[Constraint]:
    preds = list(schema)
    if family == "fd":
        binary = [p for p in preds if schema[p].arity == 2]
        if not binary:
            return None
        p = rng.choice(binary)
        if rng.random() < 0.5:
            return Constraint((), (Atom(p, (X, Y)), Atom(p, (X, Z))), (builtin("=", Y, Z),))
        return Constraint((), (Atom(p, (Y, X)), Atom(p, (Z, X))), (builtin("=", Y, Z),))
    if family == "inclusion":
        p, q = rng.choice(preds), rng.choice(preds)
        src = _vars(schema[p].arity)
        if not src and schema[q].arity:
            return None
        tgt = tuple(rng.choice(src) for _ in range(schema[q].arity)) if src else ()
        if p == q and tgt == src:
            return None
        return Constraint((Atom(q, tgt),), (Atom(p, src),))
    if family == "range":
        p = rng.choice([p for p in preds if schema[p].arity] or [None])
        if p is None:
            return None
        vs = _vars(schema[p].arity)
        v = rng.choice(vs)
        op = rng.choice(("!=", "<=", ">="))
        return Constraint((), (Atom(p, vs),), (builtin(op, v, rng.choice(domain)),))
    if family == "exclusion":
        p, q = rng.choice(preds), rng.choice(preds)
        a = _vars(schema[p].arity)
        if schema[q].arity and not a:
            return None
        b = tuple(rng.choice(a) for _ in range(schema[q].arity)) if a else ()
        if p == q and a == b:
            return None
        return Constraint((), (Atom(p, a), Atom(q, b)))
    raise ValueError(family)


def random_bic_instance(rng: random.Random, max_universe: int = 18):
    """A random instance, BIC set and finite domain within the oracle's bound."""
    while True:
        d = rng.randint(1, 3)
        npred = rng.randint(1, 3)
        arities = [rng.randint(0, 2) if rng.random() < 0.15 else rng.randint(1, 2) for _ in range(npred)]
        if sum(d ** a for a in arities) <= max_universe:
            break
    domain = list(range(1, d + 1))
    names = ["p", "q", "s"][:npred]
    schema = Schema({n: a for n, a in zip(names, arities)})
    facts = set()
    density = rng.uniform(0.2, 0.7)
    for n, a in zip(names, arities):
        for args in itertools.product(domain, repeat=a):
            if rng.random() < density:
                facts.add(Atom(n, args))
    ics = []
    for _ in range(rng.randint(1, 3)):
        for _attempt in range(10):
            c = random_bic(rng, schema, rng.choice(BIC_FAMILIES), domain)
            if c is not None:
                ics.append(c)
                break
    return DatabaseInstance(schema, frozenset(facts)), ics, domain


def random_fd_unary_instance(rng: random.Random, max_universe: int = 18):
    """Like :func:`random_bic_instance` but with functional dependencies and unary constraints only."""
    while True:
        r, _, domain = random_bic_instance(rng, max_universe)
        ics = []
        for _ in range(rng.randint(1, 3)):
            fam = rng.choice(("fd", "range"))
            c = random_bic(rng, r.schema, fam, domain)
            if c is not None:
                ics.append(c)
        if ics:
            return r, ics, domain


def random_ground_program(rng: random.Random, n_atoms: int = 5, n_rules: Optional[int] = None,
                          defaults: bool = False) -> list:
    """A random ground extended disjunctive program over at most ``2 * n_atoms`` literals."""
    atoms = [Atom(f"a{i}") for i in range(n_atoms)]

    def rand_lit():
        return Literal(rng.choice(atoms), rng.random() < 0.3)

    rules = []
    for _ in range(n_rules if n_rules is not None else rng.randint(2, 8)):
        nh = rng.choices((0, 1, 2, 3), weights=(1, 6, 3, 1))[0]
        head = tuple({rand_lit() for _ in range(nh)})
        body = tuple({BodyLiteral(rand_lit(), rng.random() < 0.5) for _ in range(rng.randint(0, 3))})
        if not head and not body:
            continue
        kind = RuleKind.STRONG_CONSTRAINT if not head else RuleKind.AUX
        if defaults and len(head) == 1 and rng.random() < 0.3:
            kind = RuleKind.PERSISTENCE_DEFAULT
            body = tuple(b for b in body if not b.naf)
        rules.append(Rule(head, body, kind))
    return rules


__all__ = [
    "candidate_universe", "enumerate_repairs_bruteforce", "enumerate_answer_sets_naive", "s_of", "is_model",
    "random_bic_instance", "random_fd_unary_instance", "random_ground_program", "random_bic",
    "REPAIR_BOUND", "ANSWER_SET_BOUND",
]
