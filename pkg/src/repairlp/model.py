"""Value types shared by the whole package.

Constants are plain Python ``str`` (symbols) or ``int`` values.  Variables
are :class:`Var` instances and the distinguished null value is :data:`NULL`.
Every type here is immutable once built.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .errors import SchemaError, UnsafeError


class _Null:
    """The null constant: outside the database domain, never a variable value."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NULL"

    def __str__(self):
        return "null"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


class Var(NamedTuple):
    name: str

    def __str__(self):
        return self.name


Constant = Union[str, int]
Term = Union[str, int, Var, _Null]

BUILTIN_OPS = ("=", "!=", "<", "<=", ">", ">=")
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def is_var(t) -> bool:
    return isinstance(t, Var)


def term_key(t):
    """Total order on terms: integers numerically, then symbols, then null, then variables."""
    if isinstance(t, bool):
        raise TypeError("booleans are not terms")
    if isinstance(t, int):
        return (0, t, "")
    if isinstance(t, str):
        return (1, 0, t)
    if t is NULL:
        return (2, 0, "")
    return (3, 0, t.name)


def compare_terms(op: str, a, b) -> bool:
    """Evaluate a ground comparison under the package's fixed order."""
    if op == "=":
        return a == b and type(a) is type(b)
    if op == "!=":
        return not (a == b and type(a) is type(b))
    ka, kb = term_key(a), term_key(b)
    if op == "<":
        return ka < kb
    if op == "<=":
        return ka <= kb
    if op == ">":
        return ka > kb
    if op == ">=":
        return ka >= kb
    raise ValueError(f"unknown comparison {op!r}")


class Atom(NamedTuple):
    pred: str
    args: tuple = ()
    primed: bool = False

    @property
    def is_builtin(self) -> bool:
        return self.pred in BUILTIN_OPS

    @property
    def is_guard(self) -> bool:
        return self.pred == "dom" or self.pred.startswith("dom_")

    @property
    def kind(self) -> str:
        if self.is_builtin:
            return "builtin"
        if self.is_guard:
            return "domainGuard"
        return "database" if self.primed or not self.pred.startswith(("aux_", "query")) else "auxiliary"

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> set:
        return {t for t in self.args if isinstance(t, Var)}

    def is_ground(self) -> bool:
        return not any(isinstance(t, Var) for t in self.args)

    def substitute(self, theta: dict) -> "Atom":
        return Atom(self.pred, tuple(theta.get(t, t) if isinstance(t, Var) else t for t in self.args),
                    self.primed)

    def prime(self) -> "Atom":
        return Atom(self.pred, self.args, True)

    def unprime(self) -> "Atom":
        return Atom(self.pred, self.args, False)

    def sort_key(self):
        return (self.pred, self.primed, len(self.args), tuple(term_key(t) for t in self.args))

    def __str__(self):
        if self.is_builtin:
            return f"{format_term(self.args[0])} {self.pred} {format_term(self.args[1])}"
        name = self.pred + ("'" if self.primed else "")
        if not self.args:
            return name
        return f"{name}({','.join(format_term(t) for t in self.args)})"


def format_term(t) -> str:
    if isinstance(t, str):
        if t and t[0].islower() and t.replace("_", "a").isalnum() and t.isascii():
            return t
        return '"' + t.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return str(t)


def builtin(op: str, left, right) -> Atom:
    if op not in BUILTIN_OPS:
        raise ValueError(f"unknown comparison {op!r}")
    return Atom(op, (left, right))


class Literal(NamedTuple):
    atom: Atom
    neg: bool = False

    def sort_key(self):
        return (self.atom.sort_key(), self.neg)

    def __str__(self):
        return ("-" if self.neg else "") + str(self.atom)


def lit(atom: Atom, neg: bool = False) -> Literal:
    """Build a literal; negated comparisons are normalised to the complementary operator."""
    if neg and atom.is_builtin:
        return Literal(Atom(NEGATED_OP[atom.pred], atom.args), False)
    return Literal(atom, neg)


def complement(l: Literal) -> Literal:
    if l.atom.is_builtin:
        return Literal(Atom(NEGATED_OP[l.atom.pred], l.atom.args), False)
    return Literal(l.atom, not l.neg)


class BodyLiteral(NamedTuple):
    lit: Literal
    naf: bool = False

    def sort_key(self):
        return (self.lit.sort_key(), self.naf)

    def __str__(self):
        return ("not " if self.naf else "") + str(self.lit)


def pos(atom: Atom, neg: bool = False) -> BodyLiteral:
    return BodyLiteral(lit(atom, neg), False)


def naf(atom: Atom, neg: bool = False) -> BodyLiteral:
    return BodyLiteral(lit(atom, neg), True)


class RuleKind(enum.Enum):
    FACT = "fact"
    TRIGGERING = "triggering"
    STABILIZING = "stabilizing"
    PERSISTENCE_DEFAULT = "persistenceDefault"
    PERSISTENCE_RULE = "persistenceRule"
    QUERY = "queryRule"
    WEAK_CONSTRAINT = "weakConstraint"
    STRONG_CONSTRAINT = "strongConstraint"
    AUX = "auxiliaryDef"


@dataclass(frozen=True)
class Rule:
    head: tuple
    body: tuple = ()
    kind: RuleKind = field(default=RuleKind.AUX, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))
        if self.kind in (RuleKind.WEAK_CONSTRAINT, RuleKind.STRONG_CONSTRAINT) and self.head:
            raise ValueError("constraint rules must have an empty head")

    @property
    def key(self):
        return (frozenset(self.head), frozenset(self.body), self.kind is RuleKind.WEAK_CONSTRAINT)

    @property
    def is_constraint(self) -> bool:
        return not self.head

    def variables(self) -> set:
        out = set()
        for l in self.head:
            out |= l.atom.variables()
        for b in self.body:
            out |= b.lit.atom.variables()
        return out

    def bound_variables(self) -> set:
        out = set()
        for b in self.body:
            if not b.naf and not b.lit.atom.is_builtin:
                out |= b.lit.atom.variables()
        return out

    def unsafe_variables(self) -> set:
        return self.variables() - self.bound_variables()

    def check_safe(self) -> None:
        bad = self.unsafe_variables()
        if bad:
            names = ", ".join(sorted(v.name for v in bad))
            raise UnsafeError(f"unsafe variable(s) {names} in rule {self}")

    def substitute(self, theta: dict) -> "Rule":
        head = tuple(Literal(l.atom.substitute(theta), l.neg) for l in self.head)
        body = tuple(BodyLiteral(Literal(b.lit.atom.substitute(theta), b.lit.neg), b.naf) for b in self.body)
        return Rule(head, body, self.kind)

    def __str__(self):
        head = " v ".join(str(l) for l in self.head)
        body = ", ".join(str(b) for b in self.body)
        if self.kind is RuleKind.WEAK_CONSTRAINT:
            return f":~ {body}."
        if not body:
            return f"{head}."
        return f"{head} :- {body}." if head else f":- {body}."


class Program:
    """An ordered, duplicate-free collection of rules."""

    def __init__(self, rules: Iterable[Rule] = (), domain: Optional[Iterable] = None):
        seen = set()
        kept = []
        for r in rules:
            if r.key not in seen:
                seen.add(r.key)
                kept.append(r)
        self.rules = tuple(kept)
        self.domain = None if domain is None else frozenset(domain)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __add__(self, other):
        rules = other.rules if isinstance(other, Program) else tuple(other)
        dom = self.domain
        if isinstance(other, Program) and other.domain is not None:
            dom = other.domain if dom is None else dom | other.domain
        return Program(self.rules + rules, dom)

    def __eq__(self, other):
        return isinstance(other, Program) and {r.key for r in self} == {r.key for r in other}

    def __hash__(self):
        return hash(frozenset(r.key for r in self))

    def of_kind(self, *kinds: RuleKind):
        return [r for r in self.rules if r.kind in kinds]

    def __repr__(self):
        return f"Program({len(self.rules)} rules)"


@dataclass(frozen=True)
class Existential:
    """The existential tail ``exists vars target`` of a referential constraint."""

    target: Atom
    variables: tuple


@dataclass(frozen=True)
class Constraint:
    """A universal constraint ``p_1 v ... v p_n v -q_1 v ... v -q_m v phi``.

    ``phi`` is a disjunction of comparison atoms; an empty ``phi`` is false.
    A referential constraint ``q(X) -> exists Y t(X,Y)`` has ``negatives=(q,)``
    and the tail in ``existential``.
    """

    positives: tuple = ()
    negatives: tuple = ()
    phi: tuple = ()
    existential: Optional[Existential] = None

    def __post_init__(self):
        for name in ("positives", "negatives", "phi"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.positives and not self.negatives:
            raise ValueError("a constraint needs at least one database literal")
        for a in self.positives + self.negatives:
            if a.is_builtin or a.primed:
                raise ValueError(f"{a} is not a database atom")
        for a in self.phi:
            if not a.is_builtin:
                raise ValueError(f"{a} is not a comparison")
        db_vars = set()
        for a in self.positives + self.negatives:
            db_vars |= a.variables()
        for a in self.phi:
            if not a.variables() <= db_vars:
                raise UnsafeError(f"comparison {a} mentions a variable outside the database literals")

    @property
    def size(self) -> int:
        return len(self.positives) + len(self.negatives)

    @property
    def is_bic(self) -> bool:
        return self.existential is None and self.size <= 2

    @property
    def is_unary(self) -> bool:
        return self.existential is None and self.size == 1

    @property
    def is_fd(self) -> bool:
        """Two negated atoms of one predicate whose differing positions are equated by phi."""
        if self.existential is not None or self.positives or len(self.negatives) != 2:
            return False
        a, b = self.negatives
        if a.pred != b.pred or not all(isinstance(t, Var) for t in a.args + b.args):
            return False
        differing = {frozenset((x, y)) for x, y in zip(a.args, b.args) if x != y}
        if not differing or len(differing) == len(a.args):
            return False
        eqs = set()
        for c in self.phi:
            if c.pred != "=":
                return False
            eqs.add(frozenset(c.args))
        return eqs <= differing and len(eqs) >= 1

    def variables(self) -> set:
        out = set()
        for a in self.positives + self.negatives:
            out |= a.variables()
        if self.existential:
            out |= self.existential.target.variables()
        return out

    def atoms(self):
        return self.positives + self.negatives

    def constants(self) -> set:
        out = set()
        atoms = self.positives + self.negatives + self.phi
        if self.existential:
            atoms += (self.existential.target,)
        for a in atoms:
            out |= {t for t in a.args if not isinstance(t, Var) and t is not NULL}
        return out

    def __str__(self):
        if self.existential is not None:
            ex = self.existential
            vs = ",".join(v.name for v in ex.variables)
            return f"{self.negatives[0]} -> exists {vs} {ex.target}"
        parts = [str(a) for a in self.positives] + [f"-{a}" for a in self.negatives]
        parts += [str(c) for c in self.phi]
        return " v ".join(parts)


class PredicateSig(NamedTuple):
    arity: int
    sorts: Optional[tuple] = None


class Schema:
    """Predicate name -> arity and optional attribute sorts."""

    def __init__(self, sigs: Optional[dict] = None):
        self._sigs = {}
        for name, sig in (sigs or {}).items():
            if isinstance(sig, int):
                sig = PredicateSig(sig)
            elif not isinstance(sig, PredicateSig):
                sig = PredicateSig(*sig)
            if sig.sorts is not None and len(sig.sorts) != sig.arity:
                raise SchemaError(f"{name}: {len(sig.sorts)} sorts for arity {sig.arity}")
            self._sigs[name] = sig

    def __contains__(self, name):
        return name in self._sigs

    def __getitem__(self, name) -> PredicateSig:
        return self._sigs[name]

    def __iter__(self):
        return iter(sorted(self._sigs))

    def __len__(self):
        return len(self._sigs)

    def __eq__(self, other):
        return isinstance(other, Schema) and self._sigs == other._sigs

    def __repr__(self):
        return f"Schema({self._sigs!r})"

    def items(self):
        return sorted(self._sigs.items())

    def sort_of(self, pred: str, pos: int) -> Optional[str]:
        sig = self._sigs.get(pred)
        if sig is None or sig.sorts is None:
            return None
        return sig.sorts[pos]

    def check(self, atom: Atom) -> None:
        sig = self._sigs.get(atom.pred)
        if sig is None:
            raise SchemaError(f"unknown predicate {atom.pred}")
        if sig.arity != len(atom.args):
            raise SchemaError(f"{atom.pred} has arity {sig.arity}, got {atom}")

    def merged(self, other: "Schema") -> "Schema":
        sigs = dict(self._sigs)
        for name, sig in other._sigs.items():
            old = sigs.get(name)
            if old is not None and old.arity != sig.arity:
                raise SchemaError(f"{name} used with arities {old.arity} and {sig.arity}")
            if old is None or old.sorts is None:
                sigs[name] = sig
        return Schema(sigs)

    @classmethod
    def infer(cls, atoms: Iterable[Atom]) -> "Schema":
        sigs = {}
        for a in atoms:
            if a.is_builtin or a.is_guard:
                continue
            old = sigs.get(a.pred)
            if old is not None and old != len(a.args):
                raise SchemaError(f"{a.pred} used with arities {old} and {len(a.args)}")
            sigs[a.pred] = len(a.args)
        return cls(sigs)


@dataclass(frozen=True)
class DatabaseInstance:
    schema: Schema
    facts: frozenset = frozenset()

    def __post_init__(self):
        facts = frozenset(self.facts)
        object.__setattr__(self, "facts", facts)
        for f in facts:
            if f.primed or f.is_builtin or not f.is_ground():
                raise SchemaError(f"{f} is not a ground database atom")
            self.schema.check(f)

    def __iter__(self):
        return iter(sorted(self.facts, key=Atom.sort_key))

    def __len__(self):
        return len(self.facts)

    def __contains__(self, atom):
        return atom in self.facts

    def __eq__(self, other):
        return isinstance(other, DatabaseInstance) and self.facts == other.facts

    def __hash__(self):
        return hash(self.facts)

    def constants(self) -> set:
        return {t for f in self.facts for t in f.args if t is not NULL}

    def relation(self, pred: str) -> set:
        return {f.args for f in self.facts if f.pred == pred}

    def with_facts(self, facts) -> "DatabaseInstance":
        return DatabaseInstance(self.schema, frozenset(facts))

    def __repr__(self):
        return "{" + ", ".join(str(f) for f in self) + "}"


def delta(r: DatabaseInstance, rp: DatabaseInstance):
    """Return ``(inserted, deleted)`` taking ``r`` to ``rp``."""
    if r.schema != rp.schema:
        raise SchemaError("instances are over different schemas")
    return frozenset(rp.facts - r.facts), frozenset(r.facts - rp.facts)


class AnswerSet(frozenset):
    """A consistent set of ground literals."""

    def __new__(cls, literals=()):
        self = super().__new__(cls, literals)
        for l in self:
            if not l.neg and Literal(l.atom, True) in self:
                raise ValueError(f"answer set contains complementary literals {l} and -{l}")
        return self

    def extension(self, pred: str, primed: bool = False, neg: bool = False) -> set:
        return {l.atom.args for l in self if l.atom.pred == pred and l.atom.primed == primed and l.neg == neg}

    def sorted(self):
        return sorted(self, key=Literal.sort_key)

    def __repr__(self):
        return "{" + ", ".join(str(l) for l in self.sorted()) + "}"


@dataclass(frozen=True)
class ThreeValuedInterpretation:
    true: frozenset
    false: frozenset
    universe: frozenset = frozenset()
    entered: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.true & self.false:
            raise ValueError("a literal cannot be both true and false")
        for l in self.true:
            if Literal(l.atom, not l.neg) in self.true:
                raise ValueError(f"complementary literals {l} both true")

    @property
    def undefined(self) -> frozenset:
        return self.universe - self.true - self.false

    def is_total(self) -> bool:
        return not self.undefined

    def up_to(self, k: int) -> frozenset:
        """True literals already present after ``k`` rounds of the fixpoint."""
        return frozenset(l for l in self.true if self.entered.get(l, 0) <= k)


@dataclass(frozen=True)
class Repair:
    instance: DatabaseInstance
    inserted: frozenset
    deleted: frozenset

    @classmethod
    def between(cls, r: DatabaseInstance, rp: DatabaseInstance) -> "Repair":
        ins, dele = delta(r, rp)
        return cls(rp, ins, dele)

    @property
    def distance(self) -> int:
        return len(self.inserted) + len(self.deleted)


# --- K-queries -----------------------------------------------------------

@dataclass(frozen=True)
class QAtom:
    atom: Atom


@dataclass(frozen=True)
class QAnd:
    parts: tuple


@dataclass(frozen=True)
class QOr:
    parts: tuple


@dataclass(frozen=True)
class QNot:
    body: object


@dataclass(frozen=True)
class QExists:
    variables: tuple
    body: object


@dataclass(frozen=True)
class QK:
    body: object


def free_vars(q) -> list:
    """Free variables of a query in order of first occurrence."""
    out: list = []

    def walk(node, bound):
        if isinstance(node, QAtom):
            for t in node.atom.args:
                if isinstance(t, Var) and t not in bound and t not in out:
                    out.append(t)
        elif isinstance(node, (QAnd, QOr)):
            for p in node.parts:
                walk(p, bound)
        elif isinstance(node, (QNot, QK)):
            walk(node.body, bound)
        elif isinstance(node, QExists):
            walk(node.body, bound | set(node.variables))
        else:
            raise TypeError(f"not a query node: {node!r}")

    walk(q, frozenset())
    return out


def range_restricted(q) -> set:
    """Variables bound by a positive database atom in every disjunct."""
    if isinstance(q, QAtom):
        return set() if q.atom.is_builtin else q.atom.variables()
    if isinstance(q, QAnd):
        out = set()
        for p in q.parts:
            out |= range_restricted(p)
        return out
    if isinstance(q, QOr):
        sets = [range_restricted(p) for p in q.parts]
        return set.intersection(*sets) if sets else set()
    if isinstance(q, QNot):
        return set()
    if isinstance(q, QExists):
        return range_restricted(q.body) - set(q.variables)
    if isinstance(q, QK):
        return range_restricted(q.body)
    raise TypeError(f"not a query node: {q!r}")


def contains_k(q) -> bool:
    if isinstance(q, QK):
        return True
    if isinstance(q, QAtom):
        return False
    if isinstance(q, (QAnd, QOr)):
        return any(contains_k(p) for p in q.parts)
    return contains_k(q.body)


def query_atoms(q) -> list:
    if isinstance(q, QAtom):
        return [q.atom]
    if isinstance(q, (QAnd, QOr)):
        return [a for p in q.parts for a in query_atoms(p)]
    return query_atoms(q.body)
