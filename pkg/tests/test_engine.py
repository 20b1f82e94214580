import itertools
import random

import pytest

from ace.engine import DepthLimitError, Solver, standard_registry
from ace.kblang import parse_kb
from ace.terms import Atom, Const, HornClause, KnowledgeBase, Struct, Var, variables_of
from ace.unify import unify


def kb_of(text):
    kb, _, diags = parse_kb(text)
    assert not [d for d in diags if d.severity == "error"], diags
    return kb


class TestUnify:
    def test_textbook_mgu(self):
        s = unify(
            Atom("p", (Var("X"), Const("b"))),
            Atom("p", (Const("a"), Var("Y"))),
        )
        assert s.resolve(Var("X")) == Const("a")
        assert s.resolve(Var("Y")) == Const("b")

    def test_occurs_check(self):
        assert unify(Var("X"), Struct("f", (Var("X"),))) is None

    def test_constant_clash(self):
        assert unify(Atom("p", (Const("a"),)), Atom("p", (Const("b"),))) is None

    def test_mgu_idempotent(self):
        rng = random.Random(3)
        consts = [Const(c) for c in "ab"]
        variables = [Var(v) for v in "XYZW"]

        def random_term(depth):
            roll = rng.random()
            if depth == 0 or roll < 0.4:
                return rng.choice(consts + variables)
            return Struct(
                rng.choice("fg"),
                tuple(random_term(depth - 1) for _ in range(rng.randint(1, 2))),
            )

        for _ in range(300):
            a, b = random_term(2), random_term(2)
            s = unify(a, b)
            if s is None:
                continue
            for v in variables:
                once = s.resolve(v)
                assert s.resolve(once) == once

    def test_arity_mismatch(self):
        assert unify(Atom("p", (Const("a"),)), Atom("p", ())) is None


class TestSolver:
    def test_two_step_join(self):
        kb = kb_of("g(X,Z) <- p(X,Y), p(Y,Z).\np(a,b).\np(b,c).\n")
        solver = Solver(kb)
        solutions = solver.solve_all(Atom("g", (Const("a"), Var("W"))))
        assert len(solutions) == 1
        assert solutions[0].bindings["W"] == Const("c")
        tree = solutions[0].tree
        assert tree["goal"] == "g(a, c)"
        assert [c["goal"] for c in tree["children"]] == ["p(a, b)", "p(b, c)"]

    def test_goal_tree_preorder(self):
        kb = kb_of("g(X,Z) <- p(X,Y), p(Y,Z).\np(a,b).\np(b,c).\n")
        solver = Solver(kb)
        [solution] = solver.solve_all(Atom("g", (Const("a"), Var("W"))))

        indices = []

        def walk(node):
            indices.append(node["preorder"])
            for child in node["children"]:
                walk(child)

        walk(solution.tree)
        assert indices == list(range(len(indices)))
        assert all(
            node["status"] == "proven" for node in _flatten(solution.tree)
        )

    def test_backtracks_to_second_alternative(self):
        kb = kb_of(
            "phi <- phi1, phi2.\n"
            "phi <- phi3, phi4.\n"
            "phi3.\nphi4.\n"
        )
        solver = Solver(kb)
        solutions = solver.solve_all(Atom("phi"))
        assert len(solutions) == 1
        assert solutions[0].tree["clause"] == 1  # proved via the second clause
        assert [c["goal"] for c in solutions[0].tree["children"]] == ["phi3", "phi4"]

    def test_failure_tree_on_empty_kb(self):
        solver = Solver(KnowledgeBase())
        assert solver.solve_all(Atom("p", (Var("X"),))) == []
        tree = solver.failure_tree()
        assert tree["status"] == "failed"

    def test_solutions_in_clause_order(self):
        kb = kb_of("p(a).\np(b).\np(c).\n")
        solver = Solver(kb)
        solutions = solver.solve_all(Atom("p", (Var("X"),)))
        assert [s.bindings["X"] for s in solutions] == [Const("a"), Const("b"), Const("c")]

    def test_max_solutions(self):
        kb = kb_of("p(a).\np(b).\n")
        solver = Solver(kb)
        assert len(solver.solve_all(Atom("p", (Var("X"),)), max_solutions=1)) == 1

    def test_depth_limit_names_goal(self):
        kb = kb_of("loop(X) <- loop(X).\n")
        solver = Solver(kb, max_depth=50)
        with pytest.raises(DepthLimitError, match="loop"):
            solver.solve_all(Atom("loop", (Const("a"),)))

    def test_recursion_with_base_case(self):
        kb = kb_of(
            "anc(X,Y) <- parent(X,Y).\n"
            "anc(X,Z) <- parent(X,Y), anc(Y,Z).\n"
            "parent(a,b).\nparent(b,c).\nparent(c,d).\n"
        )
        solver = Solver(kb)
        solutions = solver.solve_all(Atom("anc", (Const("a"), Var("Z"))))
        found = {s.bindings["Z"].name for s in solutions}
        assert found == {"b", "c", "d"}

    def test_repeated_solve_on_same_solver(self):
        kb = kb_of("p(a).\n")
        solver = Solver(kb)
        assert len(solver.solve_all(Atom("p", (Var("X"),)))) == 1
        assert len(solver.solve_all(Atom("p", (Var("X"),)))) == 1

    def test_builtin_name_clash_rejected(self):
        kb = kb_of("eval(a, b).\n")
        with pytest.raises(Exception, match="builtin"):
            Solver(kb, registry=standard_registry())


def _flatten(node):
    yield node
    for child in node["children"]:
        yield from _flatten(child)


# -- bottom-up fixpoint oracle ------------------------------------------------


def bottom_up_facts(kb):
    """Naive Datalog evaluation: ground all rules over the constant universe."""
    constants = set()
    for clause in kb.clauses:
        for atom in (clause.head, *clause.body):
            for term in atom.args:
                if isinstance(term, Const):
                    constants.add(term)
    if not constants:
        constants = {Const("a")}
    constants = sorted(constants, key=lambda c: c.name)

    facts = set()
    changed = True
    while changed:
        changed = False
        for clause in kb.clauses:
            variables = variables_of(clause)
            for values in itertools.product(constants, repeat=len(variables)):
                binding = dict(zip(variables, values))

                def ground(atom):
                    return Atom(
                        atom.pred,
                        tuple(binding.get(t, t) for t in atom.args),
                    )

                if all(ground(b) in facts for b in clause.body):
                    head = ground(clause.head)
                    if head not in facts:
                        facts.add(head)
                        changed = True
    return facts


def random_datalog_kb(rng):
    """Acyclic, range-restricted KB so SLD terminates and answers are ground."""
    constants = [Const(c) for c in "abcd"]
    variables = [Var(v) for v in ("X", "Y", "Z")]
    preds = [("p%d" % i, rng.randint(1, 2)) for i in range(rng.randint(2, 5))]
    clauses = []
    n_facts = rng.randint(1, 12)
    for _ in range(n_facts):
        name, arity = rng.choice(preds)
        clauses.append(
            HornClause(Atom(name, tuple(rng.choice(constants) for _ in range(arity))))
        )
    n_rules = rng.randint(1, 8)
    for _ in range(n_rules):
        head_index = rng.randint(1, len(preds) - 1)
        name, arity = preds[head_index]
        body = []
        body_vars = []
        for _ in range(rng.randint(1, 3)):
            b_name, b_arity = preds[rng.randint(0, head_index - 1)]
            args = []
            for _ in range(b_arity):
                if rng.random() < 0.7:
                    v = rng.choice(variables)
                    args.append(v)
                    body_vars.append(v)
                else:
                    args.append(rng.choice(constants))
            body.append(Atom(b_name, tuple(args)))
        if not body_vars:
            body_vars = [None]
        head_args = []
        for _ in range(arity):
            pick = rng.choice(body_vars)
            if pick is None or rng.random() < 0.3:
                head_args.append(rng.choice(constants))
            else:
                head_args.append(pick)
        clauses.append(HornClause(Atom(name, tuple(head_args)), tuple(body)))
    return KnowledgeBase(clauses=clauses), preds


def sld_ground_solutions(solver, goal):
    return {s.subst.resolve_atom(goal) for s in solver.solve_all(goal)}


class TestAgainstFixpointOracle:
    def test_sld_matches_bottom_up_on_random_kbs(self):
        rng = random.Random(2024)
        for _ in range(60):
            kb, preds = random_datalog_kb(rng)
            oracle = bottom_up_facts(kb)
            solver = Solver(kb)
            name, arity = rng.choice(preds)
            goal = Atom(name, tuple(Var("Q%d" % i) for i in range(arity)))
            got = sld_ground_solutions(solver, goal)
            want = {f for f in oracle if f.indicator == (name, arity)}
            assert got == want

    def test_solution_set_invariant_under_clause_permutation(self):
        rng = random.Random(7)
        for _ in range(20):
            kb, preds = random_datalog_kb(rng)
            name, arity = rng.choice(preds)
            goal = Atom(name, tuple(Var("Q%d" % i) for i in range(arity)))
            base = sld_ground_solutions(Solver(kb), goal)
            shuffled = list(kb.clauses)
            rng.shuffle(shuffled)
            permuted = KnowledgeBase(clauses=shuffled)
            assert sld_ground_solutions(Solver(permuted), goal) == base
