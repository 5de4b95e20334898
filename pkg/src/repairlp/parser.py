"""Surface syntax: facts, constraints, queries and DLV-style programs.

Grammar sketch (``%`` starts a comment, statements end with ``.``)::

    fact        ::= pred(c1,...,ck).  |  pred.
    constraint  ::= lit (v lit)* .                     universal clause
                  | conj -> lit (v lit)* .             implication sugar
                  | atom -> exists V1,...,Vk atom .    referential constraint
    query       ::= formula with &, |, !, exists V, K(...) and comparisons
    rule        ::= head :- body.  |  :- body.  |  :~ body.

Variables start with an upper-case letter or ``_``; constants are lower-case
identifiers, integers or double-quoted strings.  ``-`` (or ``!`` in
constraints) is classical negation.  A schema can be declared with header
lines ``%! pred:arity[:sort1,...,sortk] ...``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, SchemaError, UnsafeError
from .model import (
    BUILTIN_OPS,
    NULL,
    Atom,
    BodyLiteral,
    Constraint,
    DatabaseInstance,
    Existential,
    Literal,
    PredicateSig,
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
    contains_k,
    format_term,
    free_vars,
    lit,
    range_restricted,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:-|:~|->|!=|<>|<=|>=|==|[=<>(),.|&!\-~])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "span")

    def __init__(self, kind, text, span):
        self.kind = kind
        self.text = text
        self.span = span

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r})"


def tokenize(text: str, filename: str = "<input>") -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(filename, line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(Token(kind, chunk, span))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(filename, line, pos - line_start + 1)))
    return tokens


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class _Parser:
    def __init__(self, text: str, filename: str = "<input>"):
        self.toks = tokenize(text, filename)
        self.i = 0
        self._anon = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def error(self, msg: str):
        raise ParseError(msg, self.tok.span)

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"

    # -- terms and atoms
    def term(self):
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return int(t.text)
        if t.kind == "op" and t.text == "-" and self.peek().kind == "number":
            self.i += 2
            return -int(self.toks[self.i - 1].text)
        if t.kind == "string":
            self.i += 1
            return _unquote(t.text)
        if t.kind == "ident":
            self.i += 1
            if t.text == "_":
                self._anon += 1
                return Var(f"_Anon{self._anon}")
            if t.text[0].isupper() or t.text[0] == "_":
                return Var(t.text)
            if t.text == "null":
                return NULL
            return t.text
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def _is_comparison_ahead(self) -> bool:
        # a comparison starts with a term followed by a comparison operator
        j = self.i
        t = self.toks[j]
        if t.kind == "op" and t.text == "-" and self.toks[j + 1].kind == "number":
            j += 1
        elif t.kind not in ("number", "string", "ident"):
            return False
        nxt = self.toks[j + 1]
        return nxt.kind == "op" and nxt.text in ("=", "==", "!=", "<>", "<", "<=", ">", ">=")

    def comparison(self) -> Atom:
        left = self.term()
        op = self.tok.text
        self.i += 1
        op = {"==": "=", "<>": "!="}.get(op, op)
        right = self.term()
        return Atom(op, (left, right))

    def atom(self, allow_vars: bool = True) -> Atom:
        t = self.tok
        if t.kind != "ident" or not (t.text[0].islower()):
            self.error(f"expected a predicate name, found {t.text or 'end of input'!r}")
        self.i += 1
        args = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self.term())
                while self.accept(","):
                    args.append(self.term())
            self.expect(")")
        a = Atom(t.text, tuple(args))
        if not allow_vars and not a.is_ground():
            raise ParseError(f"variable in fact {a}", t.span)
        return a

    def end_statement(self):
        self.expect(".")


# ---------------------------------------------------------------------------
# schema

_SCHEMA_ENTRY = re.compile(r"^([a-z][A-Za-z0-9_]*):(\d+)(?::([A-Za-z0-9_,]+))?$")


def parse_schema(text: str) -> Schema:
    """Collect ``%! pred:arity[:sorts]`` header lines."""
    sigs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line.startswith("%!"):
            continue
        for entry in line[2:].split():
            m = _SCHEMA_ENTRY.match(entry)
            if m is None:
                raise ParseError(f"bad schema entry {entry!r}", SourceSpan("<schema>", lineno, 1))
            arity = int(m.group(2))
            sorts = tuple(m.group(3).split(",")) if m.group(3) else None
            if sorts is not None and len(sorts) != arity:
                raise ParseError(f"{entry}: {len(sorts)} sorts for arity {arity}",
                                 SourceSpan("<schema>", lineno, 1))
            sigs[m.group(1)] = PredicateSig(arity, sorts)
    return Schema(sigs)


def format_schema(schema: Schema) -> str:
    entries = []
    for name, sig in schema.items():
        e = f"{name}:{sig.arity}"
        if sig.sorts:
            e += ":" + ",".join(sig.sorts)
        entries.append(e)
    return "%! " + " ".join(entries) if entries else ""


# ---------------------------------------------------------------------------
# instances

def parse_facts(text: str, filename: str = "<facts>") -> list:
    p = _Parser(text, filename)
    facts = []
    while not p.at_eof():
        a = p.atom(allow_vars=False)
        if any(t is NULL for t in a.args):
            p.error("null may not appear in an input instance")
        p.end_statement()
        facts.append(a)
    return facts


def parse_instance(text: str, schema: Optional[Schema] = None, filename: str = "<facts>") -> DatabaseInstance:
    """Parse ground facts into an instance; ``schema=None`` infers it (header lines win)."""
    facts = parse_facts(text, filename)
    header = parse_schema(text)
    if schema is None:
        schema = header.merged(Schema.infer(facts))
    elif len(header):
        schema = schema.merged(header)
    for f in facts:
        schema.check(f)
    return DatabaseInstance(schema, frozenset(facts))


# ---------------------------------------------------------------------------
# constraints

def _constraint_literal(p: _Parser):
    """Returns (atom, negated) for a clause literal."""
    negated = False
    while p.at("-") or p.at("!") or p.at("~"):
        p.i += 1
        negated = not negated
    if p._is_comparison_ahead():
        return p.comparison(), negated
    return p.atom(), negated


def _disjunction_sep(p: _Parser) -> bool:
    return p.accept("v") or p.accept("|")


def parse_constraints(text: str, schema: Optional[Schema] = None, filename: str = "<ic>") -> list:
    p = _Parser(text, filename)
    out = []
    while not p.at_eof():
        start = p.tok.span
        first = [_constraint_literal(p)]
        implication = False
        while p.accept(",") or p.accept("&"):
            first.append(_constraint_literal(p))
        if p.accept("->"):
            implication = True
        elif len(first) > 1:
            p.error("a conjunction is only allowed before '->'")
        if implication:
            if p.accept("exists"):
                out.append(_ric(p, first, start))
                p.end_statement()
                continue
            clause = [(a, not neg) for a, neg in first]
            clause.append(_constraint_literal(p))
        else:
            clause = first
        while _disjunction_sep(p):
            clause.append(_constraint_literal(p))
        if p.at("exists"):
            p.error("existential quantifiers are only supported as 'P(X) -> exists Y R(X,Y)'")
        p.end_statement()
        out.append(_normalize(clause, start))
    if schema is not None:
        for c in out:
            for a in c.atoms() + ((c.existential.target,) if c.existential else ()):
                schema.check(a)
    return out


def _normalize(clause, span) -> Constraint:
    positives, negatives, phi = [], [], []
    for atom, neg in clause:
        if atom.is_builtin:
            phi.append(lit(atom, neg).atom)
        elif neg:
            negatives.append(atom)
        else:
            positives.append(atom)
    if not positives and not negatives:
        raise ParseError("a constraint needs at least one database literal", span)
    try:
        return Constraint(tuple(positives), tuple(negatives), tuple(phi))
    except UnsafeError as e:
        raise UnsafeError(f"{span}: {e}") from None


def _ric(p: _Parser, body, span) -> Constraint:
    if len(body) != 1 or body[0][1] or body[0][0].is_builtin:
        raise ParseError("a referential constraint needs a single positive atom before '->'", span)
    variables = [p.term()]
    while p.accept(","):
        variables.append(p.term())
    if not all(isinstance(v, Var) for v in variables):
        raise ParseError("'exists' must be followed by variables", span)
    target = p.atom()
    source = body[0][0]
    ex = set(variables)
    if ex & source.variables():
        raise ParseError("existential variables must not occur before '->'", span)
    if not ex <= target.variables():
        raise ParseError("every existential variable must occur in the target atom", span)
    if not (target.variables() - ex) <= source.variables():
        raise UnsafeError(f"{span}: universal variables of the target must occur in the source atom")
    if _disjunction_sep(p):
        raise ParseError("only one existential tail per constraint is supported", span)
    return Constraint((), (source,), (), Existential(target, tuple(variables)))


# ---------------------------------------------------------------------------
# queries

def parse_query(text: str, schema: Optional[Schema] = None, filename: str = "<query>"):
    """Parse a (K-)query.  A query without ``K`` is read as ``K`` of itself."""
    p = _Parser(text, filename)
    q = _q_formula(p)
    p.accept(".")
    if not p.at_eof():
        p.error(f"unexpected {p.tok.text!r} after query")
    if contains_k(q):
        _check_k_layers(q)
    else:
        missing = set(free_vars(q)) - range_restricted(q)
        if missing:
            names = ", ".join(sorted(v.name for v in missing))
            raise UnsafeError(f"unsafe query: variable(s) {names} only occur under negation or in comparisons")
        q = QK(q)
    if schema is not None:
        for a in _atoms_of(q):
            if not a.is_builtin:
                schema.check(a)
    return q


def _atoms_of(q):
    if isinstance(q, QAtom):
        yield q.atom
    elif isinstance(q, (QAnd, QOr)):
        for part in q.parts:
            yield from _atoms_of(part)
    else:
        yield from _atoms_of(q.body)


def _check_k_layers(q, inside=False):
    if isinstance(q, QK):
        if inside or contains_k(q.body):
            raise ParseError("K may only wrap basic queries")
        missing = set(free_vars(q.body)) - range_restricted(q.body)
        if missing:
            raise UnsafeError("unsafe query inside K: " + ", ".join(sorted(v.name for v in missing)))
        return
    if isinstance(q, QAtom):
        raise ParseError(f"atom {q.atom} must be wrapped in K when mixed with K-subqueries")
    if isinstance(q, (QAnd, QOr)):
        for part in q.parts:
            _check_k_layers(part)
    else:
        _check_k_layers(q.body)


def _q_formula(p: _Parser):
    parts = [_q_conj(p)]
    while p.accept("|") or p.accept("v"):
        parts.append(_q_conj(p))
    return parts[0] if len(parts) == 1 else QOr(tuple(parts))


def _q_conj(p: _Parser):
    parts = [_q_unary(p)]
    while p.accept("&") or p.accept(","):
        parts.append(_q_unary(p))
    return parts[0] if len(parts) == 1 else QAnd(tuple(parts))


def _q_unary(p: _Parser):
    if p.accept("!") or p.accept("not") or p.accept("~"):
        return QNot(_q_unary(p))
    if p.at("exists"):
        p.i += 1
        variables = [p.term()]
        while p.accept(","):
            variables.append(p.term())
        if not all(isinstance(v, Var) for v in variables):
            p.error("'exists' must be followed by variables")
        p.accept(":")
        return QExists(tuple(variables), _q_formula(p))
    if p.at("K") and p.peek().kind == "op" and p.peek().text == "(":
        p.i += 1
        p.expect("(")
        body = _q_formula(p)
        p.expect(")")
        return QK(body)
    if p.accept("("):
        q = _q_formula(p)
        p.expect(")")
        return q
    if p._is_comparison_ahead():
        return QAtom(p.comparison())
    return QAtom(p.atom())


# ---------------------------------------------------------------------------
# DLV programs

def _program_literal(p: _Parser, schema: Optional[Schema]):
    neg = False
    if p.at("-") and p.peek().kind == "ident":
        p.i += 1
        neg = True
    if not neg and p._is_comparison_ahead():
        return Literal(p.comparison(), False)
    a = p.atom()
    if schema is not None and a.pred.endswith("_p") and a.pred[:-2] in schema:
        a = Atom(a.pred[:-2], a.args, True)
    elif a.pred.endswith("_p") and (a.pred.startswith("aux_")):
        a = Atom(a.pred[:-2], a.args, True)
    return Literal(a, neg)


def _program_body(p: _Parser, schema):
    body = []
    if p.at("."):
        return body
    while True:
        if p.accept("not"):
            body.append(BodyLiteral(_program_literal(p, schema), True))
        else:
            body.append(BodyLiteral(_program_literal(p, schema), False))
        if not p.accept(","):
            return body


def parse_program(text: str, schema: Optional[Schema] = None, filename: str = "<program>") -> Program:
    """Parse DLV syntax; ``name_p`` is read back as the primed ``name`` when ``name`` is in ``schema``."""
    p = _Parser(text, filename)
    rules = []
    while not p.at_eof():
        if p.accept(":~"):
            body = _program_body(p, schema)
            if p.accept("["):  # pragma: no cover - weights are not emitted
                p.error("weighted weak constraints are not supported")
            p.end_statement()
            rules.append(Rule((), tuple(body), RuleKind.WEAK_CONSTRAINT))
            continue
        if p.accept(":-"):
            body = _program_body(p, schema)
            p.end_statement()
            rules.append(Rule((), tuple(body), RuleKind.STRONG_CONSTRAINT))
            continue
        head = [_program_literal(p, schema)]
        while p.accept("v") or p.accept("|"):
            head.append(_program_literal(p, schema))
        body = []
        if p.accept(":-"):
            body = _program_body(p, schema)
        p.end_statement()
        kind = RuleKind.FACT if not body and len(head) == 1 else RuleKind.AUX
        rules.append(Rule(tuple(head), tuple(body), kind))
    return Program(rules)


def _dlv_atom(a: Atom) -> str:
    if a.is_builtin:
        return f"{format_term(a.args[0])}{a.pred}{format_term(a.args[1])}"
    name = a.pred + ("_p" if a.primed else "")
    if not a.args:
        return name
    return f"{name}({','.join(format_term(t) for t in a.args)})"


def format_literal(l: Literal) -> str:
    return ("-" if l.neg else "") + _dlv_atom(l.atom)


def format_body_literal(b: BodyLiteral) -> str:
    return ("not " if b.naf else "") + format_literal(b.lit)


def format_rule(r: Rule) -> str:
    body = ", ".join(format_body_literal(b) for b in r.body)
    if r.kind is RuleKind.WEAK_CONSTRAINT:
        return f":~ {body}."
    head = " v ".join(format_literal(l) for l in r.head)
    if not r.head:
        return f":- {body}."
    if not body:
        return f"{head}."
    return f"{head} :- {body}."


def emit_dlv(program) -> str:
    """Render a program (or any iterable of rules) in DLV syntax, one rule per line."""
    lines = [format_rule(r) for r in program]
    return "\n".join(lines) + ("\n" if lines else "")


def emit_facts(instance: DatabaseInstance) -> str:
    lines = [format_literal(Literal(a)) + "." for a in instance]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_domain(text: str, filename: str = "<domain>") -> list:
    """A declared finite domain: constants separated by whitespace, commas or periods."""
    p = _Parser(text, filename)
    out = []
    while not p.at_eof():
        if p.accept(",") or p.accept("."):
            continue
        t = p.term()
        if isinstance(t, Var) or t is NULL:
            p.error("a domain lists constants only")
        out.append(t)
    if not out:
        raise ParseError("a declared domain must be nonempty", SourceSpan(filename, 1, 1))
    return out


__all__ = [
    "SourceSpan", "parse_schema", "format_schema", "parse_facts", "parse_instance", "parse_constraints",
    "parse_query", "parse_program", "emit_dlv", "emit_facts", "format_rule", "format_literal",
    "parse_domain", "BUILTIN_OPS", "SchemaError",
]
