"""SLD resolution over Horn clauses with goal-tree tracing and builtins.

The solver is a generator: it yields ``Solution`` items as proofs are found
and ``Ask`` items when a builtin needs an operator answer.  Sending the
answer resumes the search, which makes a suspended proof an ordinary Python
object that a session can hold between requests.

Search order is the classical one: clauses in knowledge-base order, body
atoms left to right, chronological backtracking on failure.  There is no cut
and no negation.  Every solution carries a snapshot of the goal tree; after
an exhausted search the failed tree remains available for diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from ..store import FactStore
from ..terms import Atom, HornClause, KnowledgeBase, Struct, Term, Var, atom_text, variables_of
from ..unify import Subst, unify


class EngineError(Exception):
    pass


class DepthLimitError(EngineError):
    def __init__(self, goal: Atom, limit: int):
        super().__init__(
            "depth limit %d exceeded at goal %s" % (limit, atom_text(goal))
        )
        self.goal = goal
        self.limit = limit


class BuiltinError(EngineError):
    pass


class BuiltinModeError(BuiltinError):
    def __init__(self, name: str, arity: int, position: int):
        super().__init__(
            "builtin %s/%d: argument %d must be bound" % (name, arity, position)
        )
        self.predicate = (name, arity)
        self.position = position


@dataclass
class Ask:
    """Question raised mid-proof; the driver answers via generator send()."""

    question: str
    kind: str = "yes_no"


@dataclass
class Solution:
    bindings: dict  # query variable name -> resolved term
    subst: Subst
    tree: dict  # goal-tree snapshot (see GoalNode.snapshot)


_RENAME_SUFFIX = re.compile(r"#\d+$")


def _display(atom: Atom) -> str:
    return _RENAME_SUFFIX.sub("", atom_text(atom))  # hide standardize-apart tags


class GoalNode:
    """Mutable search-tree node; snapshots freeze it for reporting."""

    __slots__ = ("goal", "status", "clause_index", "builtin", "children")

    def __init__(self, goal: Atom):
        self.goal = goal
        self.status = "pending"
        self.clause_index: Optional[int] = None
        self.builtin = False
        self.children: list[GoalNode] = []

    def snapshot(self, subst: Optional[Subst] = None) -> dict:
        """Freeze the tree to plain dicts, assigning preorder indices."""
        counter = [0]

        def walk(node: GoalNode) -> dict:
            goal = subst.resolve_atom(node.goal) if subst is not None else node.goal
            out = {
                "goal": _display(goal),
                "status": node.status,
                "clause": node.clause_index,
                "builtin": node.builtin,
                "preorder": counter[0],
            }
            counter[0] += 1
            out["children"] = [walk(child) for child in node.children]
            return out

        return walk(self)


@dataclass
class BuiltinSpec:
    name: str
    arity: int
    modes: str  # one char per argument: '+' must be bound, '?' free or bound
    handler: object  # callable(BuiltinCall) -> iterable of Subst (may yield Ask)

    def __post_init__(self):
        if len(self.modes) != self.arity:
            raise EngineError(
                "builtin %s/%d: modes %r do not match arity"
                % (self.name, self.arity, self.modes)
            )


class BuiltinRegistry:
    def __init__(self):
        self._specs: dict[tuple, BuiltinSpec] = {}

    def register(self, name: str, arity: int, modes: str, handler) -> None:
        key = (name, arity)
        if key in self._specs:
            raise EngineError("builtin %s/%d already registered" % key)
        self._specs[key] = BuiltinSpec(name, arity, modes, handler)

    def lookup(self, name: str, arity: int) -> Optional[BuiltinSpec]:
        return self._specs.get((name, arity))

    def indicators(self) -> set:
        return set(self._specs)


@dataclass
class BuiltinCall:
    """Everything a builtin handler sees about one invocation."""

    solver: "Solver"
    goal: Atom
    args: tuple  # goal arguments with the substitution applied
    subst: Subst
    scope: dict  # caller-clause variable name -> renamed Var

    @property
    def store(self) -> FactStore:
        return self.solver.store

    def unify_all(self, *pairs) -> Optional[Subst]:
        subst = self.subst
        for left, right in pairs:
            subst = unify(left, right, subst)
            if subst is None:
                return None
        return subst


class Solver:
    """One inference session over an immutable knowledge base.

    ``models`` and ``tables`` hold fitted analytic models and decision tables
    for the analytics builtins; ``extra`` is scratch space for scenario
    recorders."""

    def __init__(
        self,
        kb: KnowledgeBase,
        store: Optional[FactStore] = None,
        registry: Optional[BuiltinRegistry] = None,
        models: Optional[dict] = None,
        tables: Optional[dict] = None,
        max_depth: int = 10_000,
    ):
        self.kb = kb
        self.store = store if store is not None else FactStore()
        self.registry = registry if registry is not None else BuiltinRegistry()
        self.models = models if models is not None else {}
        self.tables = tables if tables is not None else {}
        self.max_depth = max_depth
        self.root: Optional[GoalNode] = None
        self._rename_counter = 0
        self._index: dict[tuple, list] = {}
        for idx, clause in enumerate(kb.clauses):
            self._index.setdefault(clause.head.indicator, []).append((idx, clause))
        overlap = self.registry.indicators() & set(self._index)
        if overlap:
            name, arity = sorted(overlap)[0]
            raise EngineError(
                "predicate %s/%d is defined by clauses and registered as a builtin"
                % (name, arity)
            )

    # -- clause renaming ---------------------------------------------------

    def _rename_clause(self, clause: HornClause) -> tuple[HornClause, dict]:
        """Standardize apart; returns the fresh instance and its name scope."""
        self._rename_counter += 1
        tag = self._rename_counter
        mapping: dict[Var, Var] = {}
        scope: dict[str, Var] = {}

        def rename_term(term: Term) -> Term:
            if isinstance(term, Var):
                if term not in mapping:
                    base = _RENAME_SUFFIX.sub("", term.name)
                    fresh = Var("%s#%d" % (base, tag))
                    mapping[term] = fresh
                    scope[base] = fresh
                return mapping[term]
            if isinstance(term, Struct):
                return Struct(term.functor, tuple(rename_term(a) for a in term.args))
            return term

        def rename_atom(atom: Atom) -> Atom:
            return Atom(atom.pred, tuple(rename_term(a) for a in atom.args))

        renamed = HornClause(
            rename_atom(clause.head), tuple(rename_atom(a) for a in clause.body)
        )
        return renamed, scope

    # -- search ------------------------------------------------------------

    def solve(self, goal: Atom, max_solutions: Optional[int] = None) -> Iterator:
        """Enumerate proofs of ``goal``; yields Solution and Ask items."""
        root = GoalNode(goal)
        self.root = root
        query_vars = variables_of(goal)
        scope = {v.name: v for v in query_vars}
        produced = 0
        gen = self._solve_goals([(goal, root, scope)], Subst(), 1)
        to_send = None
        while True:
            try:
                item = gen.send(to_send)
            except StopIteration:
                return
            to_send = None
            if isinstance(item, Ask):
                to_send = yield item
            else:
                solution = Solution(
                    bindings={v.name: item.resolve(v) for v in query_vars},
                    subst=item,
                    tree=root.snapshot(item),
                )
                produced += 1
                yield solution
                if max_solutions is not None and produced >= max_solutions:
                    gen.close()
                    return

    def failure_tree(self) -> Optional[dict]:
        """Tree of the last solve; after exhaustion it shows what failed."""
        return self.root.snapshot() if self.root is not None else None

    def _solve_goals(self, goals: list, subst: Subst, depth: int):
        if not goals:
            yield subst
            return
        if depth > self.max_depth:
            goal = goals[0][0]
            raise DepthLimitError(subst.resolve_atom(goal), self.max_depth)
        (goal, node, scope), rest = goals[0], goals[1:]
        spec = self.registry.lookup(goal.pred, len(goal.args))
        if spec is not None:
            yield from self._solve_builtin(spec, goal, node, scope, rest, subst, depth)
            return

        produced = False
        for clause_index, clause in self._index.get(goal.indicator, []):
            renamed, clause_scope = self._rename_clause(clause)
            new_subst = unify(goal, renamed.head, subst)
            if new_subst is None:
                continue
            node.clause_index = clause_index
            node.status = "pending"
            children = [GoalNode(new_subst.resolve_atom(a)) for a in renamed.body]
            node.children = children
            body_goals = [
                (atom, child, clause_scope)
                for atom, child in zip(renamed.body, children)
            ]
            sub = self._solve_goals(body_goals + rest, new_subst, depth + 1)
            to_send = None
            while True:
                try:
                    item = sub.send(to_send)
                except StopIteration:
                    break
                to_send = None
                if isinstance(item, Ask):
                    to_send = yield item
                else:
                    node.status = "proven"
                    produced = True
                    yield item
        if not produced:
            node.status = "failed"

    def _solve_builtin(self, spec: BuiltinSpec, goal, node, scope, rest, subst, depth):
        node.builtin = True
        args = tuple(subst.resolve(a) for a in goal.args)
        for position, mode in enumerate(spec.modes, start=1):
            if mode == "+" and isinstance(args[position - 1], Var):
                raise BuiltinModeError(spec.name, spec.arity, position)
        call = BuiltinCall(self, goal, args, subst, scope)
        result = spec.handler(call)
        produced = False
        if result is None:
            result = iter(())
        iterator = iter(result)
        to_send = None
        while True:
            try:
                item = iterator.send(to_send) if hasattr(iterator, "send") else next(iterator)
            except StopIteration:
                break
            to_send = None
            if isinstance(item, Ask):
                to_send = yield item
                continue
            if item is None:
                continue
            node.status = "proven"
            sub = self._solve_goals(rest, item, depth)
            inner_send = None
            while True:
                try:
                    inner = sub.send(inner_send)
                except StopIteration:
                    break
                inner_send = None
                if isinstance(inner, Ask):
                    inner_send = yield inner
                else:
                    produced = True
                    yield inner
        if node.status != "proven":
            node.status = "failed"
        _ = produced

    # -- convenience drivers ------------------------------------------------

    def solve_all(
        self,
        goal: Atom,
        answers: Optional[list] = None,
        max_solutions: Optional[int] = None,
    ) -> list:
        """Collect all solutions, answering asks from a script.

        Raises EngineError if a question arrives with the script exhausted."""
        script = list(answers or [])
        cursor = 0
        out = []
        gen = self.solve(goal, max_solutions=max_solutions)
        to_send = None
        while True:
            try:
                item = gen.send(to_send)
            except StopIteration:
                return out
            to_send = None
            if isinstance(item, Ask):
                if cursor >= len(script):
                    gen.close()
                    raise AnswersExhausted(item.question)
                to_send = script[cursor]
                cursor += 1
            else:
                out.append(item)

    def first_solution(self, goal: Atom, answers: Optional[list] = None):
        found = self.solve_all(goal, answers=answers, max_solutions=1)
        return found[0] if found else None


class AnswersExhausted(EngineError):
    def __init__(self, question: str):
        super().__init__("no scripted answer left for question: %s" % question)
        self.question = question
