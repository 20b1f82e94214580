"""Substitutions and unification with occurs check."""

from __future__ import annotations

from typing import Optional, Union

from .terms import Atom, Const, Num, Struct, Term, Text, Var


class Subst:
    """Triangular substitution: a finite map from variables to terms.

    Binding never overwrites; ``resolve`` applies bindings exhaustively, so
    applying a resolved term a second time is a no-op (idempotence).
    """

    __slots__ = ("mapping",)

    def __init__(self, mapping: Optional[dict] = None):
        self.mapping: dict[Var, Term] = mapping or {}

    def walk(self, term: Term) -> Term:
        """Chase variable links one level deep."""
        while isinstance(term, Var) and term in self.mapping:
            term = self.mapping[term]
        return term

    def bind(self, var: Var, term: Term) -> "Subst":
        new = dict(self.mapping)
        new[var] = term
        return Subst(new)

    def resolve(self, term: Term) -> Term:
        """Apply the substitution throughout the term."""
        term = self.walk(term)
        if isinstance(term, Struct):
            return Struct(term.functor, tuple(self.resolve(a) for a in term.args))
        return term

    def resolve_atom(self, atom: Atom) -> Atom:
        return Atom(atom.pred, tuple(self.resolve(a) for a in atom.args))

    def project(self, variables) -> dict[str, Term]:
        """Resolved bindings for the given variables, keyed by name."""
        return {v.name: self.resolve(v) for v in variables}

    def __contains__(self, var: Var) -> bool:
        return var in self.mapping

    def __len__(self):
        return len(self.mapping)

    def __repr__(self):
        inner = ", ".join("%s=%r" % (v.name, t) for v, t in self.mapping.items())
        return "{%s}" % inner


def occurs_in(var: Var, term: Term, subst: Subst) -> bool:
    term = subst.walk(term)
    if isinstance(term, Var):
        return term == var
    if isinstance(term, Struct):
        return any(occurs_in(var, a, subst) for a in term.args)
    return False


def unify(a: Union[Term, Atom], b: Union[Term, Atom], subst: Optional[Subst] = None) -> Optional[Subst]:
    """Most general unifier extending ``subst``, or None on failure."""
    if subst is None:
        subst = Subst()
    if isinstance(a, Atom) or isinstance(b, Atom):
        if not (isinstance(a, Atom) and isinstance(b, Atom)):
            return None
        if a.pred != b.pred or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            subst = unify(x, y, subst)
            if subst is None:
                return None
        return subst
    return _unify_terms(a, b, subst)


def _unify_terms(a: Term, b: Term, subst: Subst) -> Optional[Subst]:
    a = subst.walk(a)
    b = subst.walk(b)
    if isinstance(a, Var):
        if a == b:
            return subst
        if occurs_in(a, b, subst):
            return None
        return subst.bind(a, b)
    if isinstance(b, Var):
        if occurs_in(b, a, subst):
            return None
        return subst.bind(b, a)
    if isinstance(a, Const) and isinstance(b, Const):
        return subst if a.name == b.name else None
    if isinstance(a, Num) and isinstance(b, Num):
        return subst if a.value == b.value else None
    if isinstance(a, Text) and isinstance(b, Text):
        return subst if a.value == b.value else None
    if isinstance(a, Struct) and isinstance(b, Struct):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            subst = _unify_terms(x, y, subst)
            if subst is None:
                return None
        return subst
    return None
