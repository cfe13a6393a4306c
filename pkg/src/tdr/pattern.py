"""Propositional patterns over edge labels.

Grammar (keywords are upper-case; ``&``, ``|``, ``!`` are symbolic aliases)::

    Or    := And (("OR" | "|") And)*
    And   := Unary (("AND" | "&") Unary)*
    Unary := ("NOT" | "!") Unary | "(" Or ")" | LABEL | Sugar
    Sugar := ("ALL_OF" | "ANY_OF" | "NONE_OF") "{" LABEL ("," LABEL)* "}"

A pattern is normalized into disjunctive normal form: a set of clauses, each
requiring some labels to be present (``required``) and others absent
(``excluded``) on a path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import PatternSyntaxError, PatternTooComplex, UnknownLabel

DEFAULT_MAX_CLAUSES = 256

KEYWORDS = frozenset({"AND", "OR", "NOT", "ALL_OF", "ANY_OF", "NONE_OF"})


@dataclass(frozen=True)
class Label:
    name: Hashable

    def __str__(self):
        return str(self.name)


@dataclass(frozen=True)
class Not:
    child: "Pattern"


@dataclass(frozen=True)
class And:
    children: tuple["Pattern", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple["Pattern", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or needs at least two children")


Pattern = Union[Label, Not, And, Or]


def conj(parts: Iterable[Pattern]) -> Pattern:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Pattern]) -> Pattern:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def all_of(labels: Iterable[Hashable]) -> Pattern:
    return conj(Label(l) for l in labels)


def any_of(labels: Iterable[Hashable]) -> Pattern:
    return disj(Label(l) for l in labels)


def none_of(labels: Iterable[Hashable]) -> Pattern:
    return conj(Not(Label(l)) for l in labels)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_]+)|([()&|!{},]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []  # (kind, value, char offset)
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip():
                    start = pos + len(rest) - len(rest.lstrip())
                    raise PatternSyntaxError(self._bytes(start), f"unexpected character {text[start]!r}")
                break
            word, sym = m.groups()
            start = m.start(1) if word else m.start(2)
            if word:
                self.tokens.append(("KW" if word in KEYWORDS else "LABEL", word, start))
            else:
                self.tokens.append(("SYM", sym, start))
            pos = m.end()
        self.tokens.append(("EOF", "", len(text)))
        self.i = 0

    def _bytes(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str) -> PatternSyntaxError:
        kind, value, offset = self.peek()
        found = "end of input" if kind == "EOF" else repr(value)
        return PatternSyntaxError(self._bytes(offset), f"{message}, found {found}")

    def expect(self, sym: str) -> None:
        kind, value, _ = self.peek()
        if kind != "SYM" or value != sym:
            raise self.error(f"expected {sym!r}")
        self.advance()

    def at(self, *alternatives: str) -> bool:
        kind, value, _ = self.peek()
        return kind in ("KW", "SYM") and value in alternatives

    def parse(self) -> Pattern:
        node = self.parse_or()
        if self.peek()[0] != "EOF":
            raise self.error("expected operator or end of pattern")
        return node

    def parse_or(self) -> Pattern:
        items = [self.parse_and()]
        while self.at("OR", "|"):
            self.advance()
            items.append(self.parse_and())
        return disj(items)

    def parse_and(self) -> Pattern:
        items = [self.parse_unary()]
        while self.at("AND", "&"):
            self.advance()
            items.append(self.parse_unary())
        return conj(items)

    def parse_unary(self) -> Pattern:
        kind, value, _ = self.peek()
        if self.at("NOT", "!"):
            self.advance()
            return Not(self.parse_unary())
        if kind == "SYM" and value == "(":
            self.advance()
            node = self.parse_or()
            self.expect(")")
            return node
        if kind == "LABEL":
            self.advance()
            return Label(value)
        if kind == "KW" and value in ("ALL_OF", "ANY_OF", "NONE_OF"):
            self.advance()
            self.expect("{")
            names = [self.label()]
            while self.at(","):
                self.advance()
                names.append(self.label())
            self.expect("}")
            return {"ALL_OF": all_of, "ANY_OF": any_of, "NONE_OF": none_of}[value](names)
        raise self.error("expected label, NOT, '(' or set operator")

    def label(self) -> str:
        kind, value, _ = self.peek()
        if kind != "LABEL":
            raise self.error("expected label")
        self.advance()
        return value


def parse(text: str) -> Pattern:
    """Parse pattern text into an AST (labels unresolved)."""
    return _Parser(text).parse()


def to_text(node: Pattern) -> str:
    """Canonical printer; ``parse(to_text(p)) == p`` for string-labeled ASTs."""
    if isinstance(node, Label):
        return str(node.name)
    if isinstance(node, Not):
        inner = to_text(node.child)
        return f"NOT {inner}" if isinstance(node.child, (Label, Not)) else f"NOT ({inner})"
    op = " AND " if isinstance(node, And) else " OR "
    return op.join(
        to_text(c) if isinstance(c, (Label, Not)) else f"({to_text(c)})" for c in node.children
    )


def labels_of(node: Pattern) -> set:
    if isinstance(node, Label):
        return {node.name}
    if isinstance(node, Not):
        return labels_of(node.child)
    out = set()
    for c in node.children:
        out |= labels_of(c)
    return out


def bind(node: Pattern, label_ids: Mapping[str, int], *, strict: bool = False) -> tuple[Pattern, set[str]]:
    """Resolve label names to ids.

    Names missing from ``label_ids`` get fresh ids ``>= len(label_ids)`` (so no
    graph edge carries them) unless ``strict``, which raises UnknownLabel.
    Returns the bound AST and the set of unknown names.
    """
    fresh: dict[str, int] = {}

    def resolve(name) -> int:
        if isinstance(name, int):
            return name
        idx = label_ids.get(name)
        if idx is not None:
            return idx
        if strict:
            raise UnknownLabel(name)
        return fresh.setdefault(name, len(label_ids) + len(fresh))

    def walk(n: Pattern) -> Pattern:
        if isinstance(n, Label):
            return Label(resolve(n.name))
        if isinstance(n, Not):
            return Not(walk(n.child))
        return type(n)(tuple(walk(c) for c in n.children))

    bound = walk(node)
    return bound, set(fresh)


def evaluate(node: Pattern, labels: set | frozenset) -> bool:
    """Propositional truth value, where a label is true iff it is in ``labels``."""
    if isinstance(node, Label):
        return node.name in labels
    if isinstance(node, Not):
        return not evaluate(node.child, labels)
    if isinstance(node, And):
        return all(evaluate(c, labels) for c in node.children)
    return any(evaluate(c, labels) for c in node.children)


# -- normal form -------------------------------------------------------------


@dataclass(frozen=True)
class Clause:
    """Conjunction: every label of ``required`` present, none of ``excluded``."""

    required: frozenset
    excluded: frozenset

    def __post_init__(self):
        if self.required & self.excluded:
            raise ValueError("clause requires and excludes the same label")

    def satisfied_by(self, labels) -> bool:
        return self.required <= labels and not (self.excluded & labels)

    def subsumes(self, other: "Clause") -> bool:
        """True when every label set satisfying ``other`` also satisfies self."""
        return self.required <= other.required and self.excluded <= other.excluded

    def sort_key(self):
        return (len(self.required) + len(self.excluded), sorted(self.required), sorted(self.excluded))

    def __repr__(self):
        r = ",".join(map(str, sorted(self.required)))
        x = ",".join(map(str, sorted(self.excluded)))
        return f"Clause(R={{{r}}}, X={{{x}}})"


@dataclass(frozen=True)
class ClauseSet:
    clauses: tuple[Clause, ...]

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def satisfied_by(self, labels) -> bool:
        return any(c.satisfied_by(labels) for c in self.clauses)

    def to_ast(self) -> Pattern:
        if not self.clauses:
            raise ValueError("the empty clause set has no label-only AST")
        terms = []
        for c in self.clauses:
            lits = [Label(l) for l in sorted(c.required)] + [Not(Label(l)) for l in sorted(c.excluded)]
            terms.append(conj(lits))
        return disj(terms)


def _reduce(clauses: Iterable[Clause]) -> list[Clause]:
    kept: list[Clause] = []
    for c in sorted(set(clauses), key=Clause.sort_key):
        if not any(k.subsumes(c) for k in kept):
            kept.append(c)
    return kept


def normalize(node: Pattern, max_clauses: int = DEFAULT_MAX_CLAUSES) -> ClauseSet:
    """Convert to DNF: push negations inward, distribute, drop contradictions
    and subsumed clauses. Raises PatternTooComplex past ``max_clauses``."""

    def check(cs: list[Clause]) -> list[Clause]:
        if len(cs) > max_clauses:
            raise PatternTooComplex(f"DNF needs more than {max_clauses} clauses")
        return cs

    def dnf(n: Pattern, negated: bool) -> list[Clause]:
        if isinstance(n, Label):
            lit = frozenset([n.name])
            return [Clause(frozenset(), lit) if negated else Clause(lit, frozenset())]
        if isinstance(n, Not):
            return dnf(n.child, not negated)
        conjunctive = isinstance(n, And) != negated
        parts = [dnf(c, negated) for c in n.children]
        if not conjunctive:
            return check(_reduce(c for p in parts for c in p))
        acc = [Clause(frozenset(), frozenset())]
        for p in parts:
            merged = []
            for a, b in product(acc, p):
                req = a.required | b.required
                exc = a.excluded | b.excluded
                if not (req & exc):
                    merged.append(Clause(req, exc))
            acc = check(_reduce(merged))
        return acc

    return ClauseSet(tuple(dnf(node, False)))


def random_pattern(rng, labels: Sequence[Hashable], max_depth: int = 4, p_leaf: float = 0.3) -> Pattern:
    """Random AST of depth at most ``max_depth`` (a bare label has depth 1)."""
    if max_depth <= 1 or rng.random() < p_leaf:
        return Label(rng.choice(labels))
    r = rng.random()
    if r < 0.2:
        return Not(random_pattern(rng, labels, max_depth - 1, p_leaf))
    kids = tuple(random_pattern(rng, labels, max_depth - 1, p_leaf) for _ in range(rng.randint(2, 3)))
    return And(kids) if r < 0.6 else Or(kids)
