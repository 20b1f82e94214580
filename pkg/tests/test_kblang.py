import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ace.kblang import (
    KBSyntaxError,
    ParseError,
    load_kb,
    parse_kb,
    parse_query,
    serialize_kb,
)
from ace.terms import Atom, Const, HornClause, KnowledgeBase, Num, PropRule, Struct, Text, Var


def parse_ok(text):
    kb, store, diags = parse_kb(text)
    errors = [d for d in diags if d.severity == "error"]
    assert not errors, errors
    return kb, store


def test_clause_grammar_mapping():
    kb, _ = parse_ok("g(X,Z) <- p(X,Y), p(Y,Z).")
    assert len(kb.clauses) == 1
    clause = kb.clauses[0]
    assert clause.head.indicator == ("g", 2)
    assert [a.indicator for a in clause.body] == [("p", 2), ("p", 2)]
    assert clause.head.args == (Var("X"), Var("Z"))


def test_prop_rule_with_trailing_question():
    kb, _ = parse_ok('prop A & B -> C ? "Is A true?" .')
    rule = kb.prop_rules[0]
    assert rule.antecedents == ("A", "B")
    assert rule.consequent == "C"
    assert rule.question_for("A") == "Is A true?"
    assert rule.question_for("B") is None


def test_prop_rule_with_inline_questions():
    kb, _ = parse_ok('prop a ? "first?" & b ? "second?" -> c.')
    rule = kb.prop_rules[0]
    assert rule.question_for("a") == "first?"
    assert rule.question_for("b") == "second?"


def test_unclosed_paren_error_at_paren_column():
    _, _, diags = parse_kb("g(X,Z <- p(X).")
    errors = [d for d in diags if d.severity == "error"]
    assert errors
    assert errors[0].span.start_col == 2  # the opening paren
    assert "unclosed" in errors[0].message


def test_error_spans_slice_nonempty():
    bad_inputs = [
        "g(X,Z <- p(X).",
        "p(a) q(b).",
        "p(.",
        'prop -> x.',
        "p(a)",  # missing final dot
        'p("unterminated).',
    ]
    for text in bad_inputs:
        _, _, diags = parse_kb(text)
        errors = [d for d in diags if d.severity == "error"]
        assert errors, text
        for d in errors:
            assert d.span.slice(text) != "", (text, d)


def test_recovery_continues_after_error():
    kb, _, diags = parse_kb("broken(X <- p.\nq(a).\n")
    assert any(d.severity == "error" for d in diags)
    assert [c.head.pred for c in kb.clauses] == ["q"]


def test_arity_conflict_warning_names_both_sites():
    _, _, diags = parse_kb("p(a).\np(a,b).\n")
    warnings = [d for d in diags if d.severity == "warning"]
    assert len(warnings) == 1
    assert "arity 2" in warnings[0].message and "arity 1" in warnings[0].message


def test_parse_query_forms():
    goal = parse_query("?- handle_event(E).")
    assert goal == Atom("handle_event", (Var("E"),))
    assert parse_query("?- p(1,2).") == Atom("p", (Num(1), Num(2)))
    with pytest.raises(ParseError, match="single goal"):
        parse_query("?- p(1). q(2).")


def test_serialize_empty_kb():
    text = serialize_kb(KnowledgeBase())
    assert text.startswith("#")
    kb, _, diags = parse_kb(text)
    assert not kb.clauses and not kb.prop_rules and not diags


def test_serialize_single_fact():
    kb = KnowledgeBase(clauses=[HornClause(Atom("p", (Const("a"),)))])
    assert "p(a)." in serialize_kb(kb)


def test_serialize_preserves_clause_order():
    kb, _ = parse_ok("b(y).\na(x).\n")
    lines = [l for l in serialize_kb(kb).splitlines() if not l.startswith("#")]
    assert lines == ["b(y).", "a(x)."]


def test_list_sugar_parses_to_cons_cells():
    kb, _ = parse_ok("p([1, 2]).")
    arg = kb.clauses[0].head.args[0]
    assert arg == Struct("cons", (Num(1), Struct("cons", (Num(2), Const("nil")))))
    kb2, _ = parse_ok("p([H | T]).")
    assert kb2.clauses[0].head.args[0] == Struct("cons", (Var("H"), Var("T")))


def test_anonymous_variables_are_fresh():
    kb, _ = parse_ok("p(_, _).")
    a, b = kb.clauses[0].head.args
    assert isinstance(a, Var) and isinstance(b, Var) and a != b


def test_table_block_goes_to_store():
    _, store = parse_ok("table rate:\nt,y\n1,2\n2,4\n\np(a).")
    assert store.table("rate").rows == [[1.0, 2.0], [2.0, 4.0]]


def test_load_kb_raises_on_errors(tmp_path):
    path = tmp_path / "bad.kb"
    path.write_text("p(a.\n", encoding="utf-8")
    with pytest.raises(KBSyntaxError):
        load_kb(path)


def test_parse_is_pure():
    text = "g(X,Z) <- p(X,Y), p(Y,Z).\np(a,b).\n"
    first = parse_kb(text)
    second = parse_kb(text)
    assert first[0].clauses == second[0].clauses
    assert first[2] == second[2]


# property: parse(serialize(kb)) structurally equals kb

_IDENTS = st.sampled_from(["p", "q", "r", "edge", "node", "cost", "fact2"])
_VARS = st.sampled_from(["X", "Y", "Z", "Value", "V2", "_tail"])
_PROPS = st.sampled_from(["a1", "b1", "c1", "Alarm", "Leak", "Stop"])
_TEXTS = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126),
    max_size=12,
)


def _terms(depth):
    scalar = st.one_of(
        _VARS.map(Var),
        _IDENTS.map(Const),
        st.integers(min_value=-999, max_value=999).map(Num),
        st.floats(
            min_value=-100, max_value=100, allow_nan=False, allow_infinity=False
        ).map(Num),
        _TEXTS.map(Text),
    )
    if depth <= 0:
        return scalar
    compound = st.builds(
        lambda f, args: Struct(f, tuple(args)),
        _IDENTS,
        st.lists(_terms(depth - 1), min_size=1, max_size=4),
    )
    return st.one_of(scalar, compound)


_ATOMS = st.builds(
    lambda p, args: Atom(p, tuple(args)),
    _IDENTS,
    st.lists(_terms(2), min_size=0, max_size=4),
)

_CLAUSES = st.builds(
    lambda head, body: HornClause(head, tuple(body)),
    _ATOMS,
    st.lists(_ATOMS, min_size=0, max_size=4),
)


@st.composite
def _prop_rules(draw):
    names = draw(st.lists(_PROPS, min_size=2, max_size=4, unique=True))
    antecedents, consequent = tuple(names[:-1]), names[-1]
    questions = []
    for name in antecedents:
        if draw(st.booleans()):
            questions.append((name, draw(_TEXTS)))
    return PropRule(antecedents, consequent, tuple(questions))


_KBS = st.builds(
    lambda clauses, props: KnowledgeBase(clauses=clauses, prop_rules=props),
    st.lists(_CLAUSES, max_size=20),
    st.lists(_prop_rules(), max_size=4),
)


@settings(max_examples=200, deadline=None)
@given(_KBS)
def test_round_trip_property(kb):
    text = serialize_kb(kb)
    parsed, _, diags = parse_kb(text)
    assert not [d for d in diags if d.severity == "error"], (text, diags)
    assert parsed.clauses == kb.clauses
    assert parsed.prop_rules == kb.prop_rules
