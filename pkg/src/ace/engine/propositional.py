"""Forward chaining over propositional rules and the Yes/No dialogue driver.

The dialogue walks the target's rule tree depth first, left to right, asking
only questions that can still change the outcome: rules with a refuted
antecedent are skipped entirely, and a proven target stops the questions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..terms import PropRule


def forward_chain(rules: Sequence[PropRule], known_true) -> set:
    """Least fixpoint of the rules over the known propositions.

    Returns only the newly derived propositions."""
    known = set(known_true)
    derived: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.consequent in known or rule.consequent in derived:
                continue
            if all(a in known or a in derived for a in rule.antecedents):
                derived.add(rule.consequent)
                changed = True
    return derived


@dataclass
class DialogueState:
    """Answers so far plus the question currently on the table."""

    true: set = field(default_factory=set)
    false: set = field(default_factory=set)
    pending: Optional[tuple] = None  # (proposition, question text)
    derived: set = field(default_factory=set)

    def __post_init__(self):
        if self.true & self.false:
            raise ValueError(
                "propositions answered both yes and no: %s" % sorted(self.true & self.false)
            )

    def answer(self, proposition: str, yes: bool) -> "DialogueState":
        if self.pending is not None and self.pending[0] != proposition:
            raise ValueError(
                "answer for %r but the pending question is %r"
                % (proposition, self.pending[0])
            )
        true = set(self.true)
        false = set(self.false)
        (true if yes else false).add(proposition)
        return DialogueState(true, false, None, set(self.derived))


@dataclass
class DialogueResult:
    state: DialogueState
    status: str  # "proven" | "refuted" | "question"
    question: Optional[tuple] = None  # (proposition, question text)
    reason: Optional[str] = None


def dialogue_step(
    rules: Sequence[PropRule],
    state: DialogueState,
    target: str,
    questions: Optional[dict] = None,
) -> DialogueResult:
    """Advance the dialogue: prove, refute, or pose the next question.

    ``questions`` maps askable propositions to their question text; when
    omitted it is collected from the rules.  Feed the operator's answer with
    ``state.answer`` and call again; at most one question per askable
    proposition is ever posed."""
    if questions is None:
        questions = {}
        for rule in rules:
            for name, text in rule.questions:
                questions.setdefault(name, text)

    derived = forward_chain(rules, state.true)
    state = DialogueState(state.true, state.false, None, derived)
    closure = state.true | derived

    rules_for: dict[str, list] = {}
    for rule in rules:
        rules_for.setdefault(rule.consequent, []).append(rule)

    answered = state.true | state.false

    def askable(p: str) -> bool:
        return p in questions and p not in answered

    def possible(p: str, visiting: frozenset) -> bool:
        if p in closure:
            return True
        if p in state.false:
            return False
        if askable(p):
            return True
        if p in visiting:
            return False
        return any(
            all(possible(a, visiting | {p}) for a in rule.antecedents)
            for rule in rules_for.get(p, [])
        )

    def next_question(p: str, visiting: frozenset) -> Optional[str]:
        if p in closure or p in state.false or p in visiting:
            return None
        if askable(p):
            return p
        for rule in rules_for.get(p, []):
            if not all(possible(a, frozenset({p})) for a in rule.antecedents):
                continue  # a refuted antecedent makes the rule dead
            for a in rule.antecedents:
                q = next_question(a, visiting | {p})
                if q is not None:
                    return q
        return None

    if target in closure:
        return DialogueResult(state, "proven")
    if target not in rules_for and not askable(target) and target not in answered:
        return DialogueResult(state, "refuted", reason="unprovable")
    question = next_question(target, frozenset())
    if question is None:
        return DialogueResult(state, "refuted")
    pending = (question, questions[question])
    state = DialogueState(state.true, state.false, pending, state.derived)
    return DialogueResult(state, "question", question=pending)
