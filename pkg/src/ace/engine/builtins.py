"""Standard builtin predicates: database access, arithmetic, comparisons,

list processing, operator dialogue, and the analytics bridge (classify,
predict, choose, bayes).  Each handler receives a BuiltinCall and yields the
substitutions that solve the goal; the ask handler yields an Ask first and
finishes once the answer is sent back in.
"""

from __future__ import annotations

import re
from typing import Optional

from ..classifiers import (
    ClassifierError,
    FrequenciesModel,
    PlaneModel,
    PotentialModel,
    SurfaceModel,
    classify_frequencies,
    classify_geometric,
    classify_potential,
)
from ..decisions import BayesInput, DecisionError, bayes_posterior, choose as choose_variant
from ..forecast import (
    Discretizer,
    PredictionError,
    RegressionModel,
    predict_discretized,
    predict_regression,
)
from ..terms import Atom, Const, NIL, Num, Struct, Term, Text, Var, list_items, make_list, term_text
from .solver import Ask, BuiltinCall, BuiltinError, BuiltinRegistry


class EvalError(BuiltinError):
    pass


# -- arithmetic expression evaluator ----------------------------------------

_EVAL_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/()]))")


def _eval_tokens(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _EVAL_TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise EvalError("bad character %r in expression %r" % (text[pos:].lstrip()[0], text))
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


def evaluate_expression(text: str, lookup: Optional[dict] = None) -> float:
    """Evaluate + - * / ( ) over numbers and named values.

    ``lookup`` maps identifier names to numbers; unknown names and division
    by zero raise EvalError."""
    tokens = _eval_tokens(text)
    pos = [0]

    def peek():
        return tokens[pos[0]]

    def advance():
        tok = tokens[pos[0]]
        pos[0] += 1
        return tok

    def factor() -> float:
        kind, value = peek()
        if kind == "num":
            advance()
            return value
        if kind == "name":
            advance()
            if lookup is None or value not in lookup:
                raise EvalError("unknown identifier %r in expression %r" % (value, text))
            return float(lookup[value])
        if kind == "op" and value == "-":
            advance()
            return -factor()
        if kind == "op" and value == "(":
            advance()
            inner = expr()
            kind, value = advance()
            if (kind, value) != ("op", ")"):
                raise EvalError("missing ')' in expression %r" % text)
            return inner
        raise EvalError("expected a value in expression %r" % text)

    def term() -> float:
        left = factor()
        while peek() == ("op", "*") or peek() == ("op", "/"):
            _, op = advance()
            right = factor()
            if op == "*":
                left *= right
            else:
                if right == 0:
                    raise EvalError("division by zero in expression %r" % text)
                left /= right
        return left

    def expr() -> float:
        left = term()
        while peek() == ("op", "+") or peek() == ("op", "-"):
            _, op = advance()
            right = term()
            left = left + right if op == "+" else left - right
        return left

    result = expr()
    if peek()[0] != "end":
        raise EvalError("trailing input in expression %r" % text)
    return result


def _as_number(term: Term, context: str) -> float:
    if isinstance(term, Num):
        return float(term.value)
    raise BuiltinError("%s: expected a number, got %s" % (context, term_text(term)))


def _number_term(value: float) -> Num:
    if float(value).is_integer():
        return Num(int(value))
    return Num(float(value))


def _atom_to_term(atom: Atom) -> Term:
    if not atom.args:
        return Const(atom.pred)
    return Struct(atom.pred, atom.args)


def _term_to_atom(term: Term, context: str) -> Atom:
    if isinstance(term, Const):
        return Atom(term.name)
    if isinstance(term, Struct):
        return Atom(term.functor, term.args)
    raise BuiltinError("%s: %s is not usable as a fact pattern" % (context, term_text(term)))


# -- handlers ----------------------------------------------------------------


def _bi_select(call: BuiltinCall):
    relation, pattern, row = call.args
    if not isinstance(relation, Const):
        raise BuiltinError("select/3: relation name must be a constant")
    pattern_atom = _term_to_atom(call.subst.resolve(pattern), "select/3")
    for fact, _ in call.store.match_facts(pattern_atom):
        fact_term = _atom_to_term(fact)
        if fact.pred != relation.name:
            continue
        out = call.unify_all((pattern, fact_term), (row, fact_term))
        if out is not None:
            yield out


def _bi_eval(call: BuiltinCall):
    expression, result = call.args
    if not isinstance(expression, Text):
        raise BuiltinError("eval/2: expression must be a string")
    lookup = {}
    for name, var in call.scope.items():
        value = call.subst.resolve(var)
        if isinstance(value, Num):
            lookup[name] = float(value.value)
    value = evaluate_expression(expression.value, lookup)
    out = call.unify_all((result, _number_term(value)))
    if out is not None:
        yield out


def _comparison(name, op):
    def handler(call: BuiltinCall):
        a, b = call.args
        if name == "eq" and not (isinstance(a, Num) and isinstance(b, Num)):
            if a == b:
                yield call.subst
            return
        left = _as_number(a, name + "/2")
        right = _as_number(b, name + "/2")
        if op(left, right):
            yield call.subst

    return handler


def _bi_length(call: BuiltinCall):
    lst, length = call.args
    items = list_items(lst)
    out = call.unify_all((length, Num(len(items))))
    if out is not None:
        yield out


def _bi_nth(call: BuiltinCall):
    index, lst, element = call.args
    n = int(_as_number(index, "nth/3"))
    items = list_items(lst)
    if 1 <= n <= len(items):
        out = call.unify_all((element, items[n - 1]))
        if out is not None:
            yield out


def _bi_member(call: BuiltinCall):
    element, lst = call.args
    for item in list_items(lst):
        out = call.unify_all((element, item))
        if out is not None:
            yield out


def _bi_append(call: BuiltinCall):
    front, back, whole = call.args
    if not isinstance(front, Var):
        items = list_items(front)
        combined = make_list(items, tail=back)
        out = call.unify_all((whole, combined))
        if out is not None:
            yield out
        return
    if not isinstance(whole, Var):
        items = list_items(whole)
        for split in range(len(items) + 1):
            out = call.unify_all(
                (front, make_list(items[:split])),
                (back, make_list(items[split:])),
            )
            if out is not None:
                yield out
        return
    raise BuiltinError("append/3: either the first or third argument must be a list")


def _bi_ask(call: BuiltinCall):
    question, answer_term = call.args
    if not isinstance(question, Text):
        raise BuiltinError("ask/2: question must be a string")
    answer = yield Ask(question.value)
    normalized = _normalize_answer(answer)
    out = call.unify_all((answer_term, normalized))
    if out is not None:
        yield out


def _normalize_answer(answer) -> Term:
    if isinstance(answer, (Const, Num, Text)):
        return answer
    if isinstance(answer, bool):
        return Const("yes" if answer else "no")
    if isinstance(answer, (int, float)):
        return Num(answer)
    if isinstance(answer, str):
        lowered = answer.strip().lower()
        if lowered in ("yes", "y", "true"):
            return Const("yes")
        if lowered in ("no", "n", "false"):
            return Const("no")
        return Text(answer)
    raise BuiltinError("ask/2: unsupported answer %r" % (answer,))


def _logic_vector_from(term: Term, context: str) -> tuple:
    values = []
    for item in list_items(term):
        values.append(int(_as_number(item, context)))
    return tuple(values)


def _bi_classify(call: BuiltinCall):
    model_name, inputs, result = call.args
    if not isinstance(model_name, Const):
        raise BuiltinError("classify/3: model name must be a constant")
    model = call.solver.models.get(model_name.name)
    if model is None:
        raise BuiltinError("classify/3: no model named %r" % model_name.name)
    vector = _logic_vector_from(inputs, "classify/3")
    try:
        if isinstance(model, (PlaneModel, SurfaceModel)):
            decision = classify_geometric(model, vector)
            outcome = Const("undecided") if decision.outcome is None else Num(decision.outcome)
        elif isinstance(model, FrequenciesModel):
            outcome = Num(classify_frequencies(model, vector))
        elif isinstance(model, PotentialModel):
            decision = classify_potential(model, vector)
            outcome = Const("undecided") if decision.outcome is None else Num(decision.outcome)
        else:
            raise BuiltinError(
                "classify/3: model %r is not a classifier" % model_name.name
            )
    except ClassifierError as exc:
        raise BuiltinError("classify/3: %s" % exc) from exc
    out = call.unify_all((result, outcome))
    if out is not None:
        yield out


def _bi_predict(call: BuiltinCall):
    model_name, inputs, result = call.args
    if not isinstance(model_name, Const):
        raise BuiltinError("predict/3: model name must be a constant")
    model = call.solver.models.get(model_name.name)
    if model is None:
        raise BuiltinError("predict/3: no model named %r" % model_name.name)
    try:
        if isinstance(model, RegressionModel):
            values = [
                _as_number(item, "predict/3") for item in list_items(inputs)
            ]
            y, _ = predict_regression(model, values)
        elif isinstance(model, Discretizer):
            vector = _logic_vector_from(inputs, "predict/3")
            y, _ = predict_discretized(model, vector)
        else:
            raise BuiltinError(
                "predict/3: model %r supports no direct prediction" % model_name.name
            )
    except PredictionError as exc:
        raise BuiltinError("predict/3: %s" % exc) from exc
    out = call.unify_all((result, _number_term(y)))
    if out is not None:
        yield out


def _bi_choose(call: BuiltinCall):
    table_name, criterion, probabilities, variant = call.args
    if not isinstance(table_name, Const):
        raise BuiltinError("choose/4: table name must be a constant")
    table = call.solver.tables.get(table_name.name)
    if table is None:
        raise BuiltinError("choose/4: no decision table named %r" % table_name.name)
    if not isinstance(criterion, Const):
        raise BuiltinError("choose/4: criterion must be a constant")
    probs = None
    if probabilities != NIL:
        probs = [
            _as_number(p, "choose/4") for p in list_items(probabilities)
        ]
    try:
        result = choose_variant(table, criterion.name, probs)
    except DecisionError as exc:
        raise BuiltinError("choose/4: %s" % exc) from exc
    out = call.unify_all((variant, Num(result.index + 1)))
    if out is not None:
        yield out


def _bi_bayes(call: BuiltinCall):
    priors, likelihoods, posteriors = call.args
    prior_values = [_as_number(p, "bayes/3") for p in list_items(priors)]
    likelihood_values = [_as_number(p, "bayes/3") for p in list_items(likelihoods)]
    labels = ["h%d" % (i + 1) for i in range(len(prior_values))]
    try:
        posterior = bayes_posterior(BayesInput(labels, prior_values, likelihood_values))
    except DecisionError as exc:
        raise BuiltinError("bayes/3: %s" % exc) from exc
    out = call.unify_all((posteriors, make_list([Num(p) for p in posterior])))
    if out is not None:
        yield out


def standard_registry() -> BuiltinRegistry:
    """Registry with the stock predicates wired in."""
    registry = BuiltinRegistry()
    registry.register("select", 3, "++?", _bi_select)
    registry.register("eval", 2, "+?", _bi_eval)
    registry.register("lt", 2, "++", _comparison("lt", lambda a, b: a < b))
    registry.register("le", 2, "++", _comparison("le", lambda a, b: a <= b))
    registry.register("eq", 2, "++", _comparison("eq", lambda a, b: a == b))
    registry.register("gt", 2, "++", _comparison("gt", lambda a, b: a > b))
    registry.register("ge", 2, "++", _comparison("ge", lambda a, b: a >= b))
    registry.register("length", 2, "+?", _bi_length)
    registry.register("nth", 3, "++?", _bi_nth)
    registry.register("member", 2, "?+", _bi_member)
    registry.register("append", 3, "???", _bi_append)
    registry.register("ask", 2, "+?", _bi_ask)
    registry.register("classify", 3, "++?", _bi_classify)
    registry.register("predict", 3, "++?", _bi_predict)
    registry.register("choose", 4, "++??", _bi_choose)
    registry.register("bayes", 3, "++?", _bi_bayes)
    return registry
