"""Logic terms, atoms, clauses and rule containers.

Terms follow the usual first-order conventions: variables are written with a
leading uppercase letter, constant symbols with a lowercase one.  Compound
terms carry a functor plus at least one argument.  Lists are ordinary
compounds built from ``cons/2`` and the constant ``nil``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union


class TermError(ValueError):
    """Malformed term, atom or clause."""


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise TermError("variable name must be nonempty")

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """Constant symbol (lowercase identifier)."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise TermError("constant name must be nonempty")

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Num:
    value: Union[int, float]

    def __post_init__(self):
        if isinstance(self.value, float) and not math.isfinite(self.value):
            raise TermError("numeric term must be finite")

    def __repr__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Text:
    value: str

    def __repr__(self):
        return '"%s"' % self.value


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.functor:
            raise TermError("functor must be nonempty")
        if len(self.args) < 1:
            raise TermError("compound term needs at least one argument")

    def __repr__(self):
        return "%s(%s)" % (self.functor, ", ".join(map(repr, self.args)))


Term = Union[Var, Const, Num, Text, Struct]

NIL = Const("nil")


def make_list(items: Sequence[Term], tail: Term = NIL) -> Term:
    """Build a cons-cell list term from a Python sequence."""
    out = tail
    for item in reversed(items):
        out = Struct("cons", (item, out))
    return out


def list_items(term: Term) -> list[Term]:
    """Unpack a proper cons list; raises TermError on partial lists."""
    items = []
    while isinstance(term, Struct) and term.functor == "cons" and len(term.args) == 2:
        items.append(term.args[0])
        term = term.args[1]
    if term != NIL:
        raise TermError("not a proper list: tail is %r" % (term,))
    return items


def is_list(term: Term) -> bool:
    while isinstance(term, Struct) and term.functor == "cons" and len(term.args) == 2:
        term = term.args[1]
    return term == NIL


@dataclass(frozen=True)
class Atom:
    """A predicate applied to zero or more terms."""

    pred: str
    args: tuple = ()

    def __post_init__(self):
        if not self.pred:
            raise TermError("predicate name must be nonempty")

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def __repr__(self):
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(map(repr, self.args)))


@dataclass(frozen=True)
class HornClause:
    """``head <- body`` rule; an empty body makes the clause a fact."""

    head: Atom
    body: tuple = ()

    @property
    def is_fact(self) -> bool:
        return not self.body

    def __repr__(self):
        if self.is_fact:
            return "%r." % self.head
        return "%r <- %s." % (self.head, ", ".join(map(repr, self.body)))


@dataclass(frozen=True)
class PropRule:
    """Propositional rule: conjunction of antecedents implies the consequent.

    ``questions`` carries optional operator-facing question text per
    proposition identifier, used by the dialogue driver.
    """

    antecedents: tuple
    consequent: str
    questions: tuple = ()  # pairs (proposition id, question text)

    def __post_init__(self):
        if not self.antecedents:
            raise TermError("propositional rule needs at least one antecedent")
        if self.consequent in self.antecedents:
            raise TermError(
                "proposition %r is both antecedent and consequent" % self.consequent
            )

    def question_for(self, prop: str) -> str | None:
        for name, text in self.questions:
            if name == prop:
                return text
        return None


@dataclass
class KnowledgeBase:
    """Ordered clause and rule container; clause order drives the solver."""

    clauses: list = field(default_factory=list)
    prop_rules: list = field(default_factory=list)
    name: str = ""
    version: str = ""

    def clauses_for(self, pred: str, arity: int) -> list[HornClause]:
        return [c for c in self.clauses if c.head.indicator == (pred, arity)]

    def indicators(self) -> set[tuple[str, int]]:
        seen = set()
        for clause in self.clauses:
            seen.add(clause.head.indicator)
            for atom in clause.body:
                seen.add(atom.indicator)
        return seen

    def questions(self) -> dict[str, str]:
        """Question text per proposition, first definition wins."""
        out: dict[str, str] = {}
        for rule in self.prop_rules:
            for name, text in rule.questions:
                out.setdefault(name, text)
        return out

    def extend(self, other: "KnowledgeBase") -> None:
        self.clauses.extend(other.clauses)
        self.prop_rules.extend(other.prop_rules)


def walk_terms(term: Term) -> Iterator[Term]:
    """Yield the term and every subterm, in preorder."""
    yield term
    if isinstance(term, Struct):
        for arg in term.args:
            yield from walk_terms(arg)


def variables_of(obj: Union[Term, Atom, HornClause, Iterable]) -> list[Var]:
    """All variables in order of first appearance."""
    seen: dict[Var, None] = {}

    def visit(t):
        if isinstance(t, Var):
            seen.setdefault(t)
        elif isinstance(t, Struct):
            for a in t.args:
                visit(a)

    def visit_atom(a: Atom):
        for t in a.args:
            visit(t)

    if isinstance(obj, Atom):
        visit_atom(obj)
    elif isinstance(obj, HornClause):
        visit_atom(obj.head)
        for a in obj.body:
            visit_atom(a)
    elif isinstance(obj, (Var, Const, Num, Text, Struct)):
        visit(obj)
    else:
        for item in obj:
            for v in variables_of(item):
                seen.setdefault(v)
    return list(seen)


def is_ground(obj: Union[Term, Atom]) -> bool:
    return not variables_of(obj)


def term_text(term: Term) -> str:
    """Concrete-syntax rendering, shared by the serializer and error messages."""
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return term.name
    if isinstance(term, Num):
        if isinstance(term.value, float) and term.value.is_integer():
            return "%.1f" % term.value
        return repr(term.value)
    if isinstance(term, Text):
        return '"%s"' % term.value.replace("\\", "\\\\").replace('"', '\\"')
    if isinstance(term, Struct):
        return "%s(%s)" % (term.functor, ", ".join(term_text(a) for a in term.args))
    raise TermError("unknown term %r" % (term,))


def atom_text(atom: Atom) -> str:
    if not atom.args:
        return atom.pred
    return "%s(%s)" % (atom.pred, ", ".join(term_text(a) for a in atom.args))
