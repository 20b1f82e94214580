"""Choice among decision variants, threat probabilities, financial scoring.

A Decision-Situation table holds the preference value of each variant under
each environment situation.  Three selection principles are supported:
pessimistic (best worst case), optimistic (best best case) and pragmatic
(best expected value under situation probabilities).  Threat probabilities
come from the Bayesian update or from event trees; enterprise financial state
from the Altman Z-score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

PROBABILITY_TOLERANCE = 1e-9


class DecisionError(ValueError):
    pass


@dataclass
class DecisionTable:
    variants: list  # labels, n >= 1
    situations: list  # labels, m >= 1
    values: list  # n x m preference matrix
    probabilities: Optional[list] = None

    def __post_init__(self):
        if not self.variants or not self.situations:
            raise DecisionError("table needs at least one variant and one situation")
        if len(self.values) != len(self.variants):
            raise DecisionError(
                "%d value rows for %d variants" % (len(self.values), len(self.variants))
            )
        for row in self.values:
            if len(row) != len(self.situations):
                raise DecisionError(
                    "row has %d values for %d situations" % (len(row), len(self.situations))
                )
        if self.probabilities is not None:
            self.probabilities = validate_distribution(
                self.probabilities, expected=len(self.situations)
            )


def validate_distribution(probabilities: Sequence[float], expected: Optional[int] = None) -> list:
    probs = [float(p) for p in probabilities]
    if expected is not None and len(probs) != expected:
        raise DecisionError("expected %d probabilities, got %d" % (expected, len(probs)))
    if any(p < 0 for p in probs):
        raise DecisionError("probabilities must be non-negative")
    total = sum(probs)
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise DecisionError("probabilities sum %g, expected 1" % total)
    return probs


@dataclass(frozen=True)
class ChoiceResult:
    index: int  # 0-based variant index
    label: str
    value: float
    criterion: str
    per_variant: tuple

    def __post_init__(self):
        assert self.per_variant[self.index] == self.value


def _argmax_lowest(values: Sequence[float]) -> int:
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def choose_pessimistic(table: DecisionTable) -> ChoiceResult:
    """Best worst case: maximize the row minimum."""
    per_variant = tuple(min(row) for row in table.values)
    k = _argmax_lowest(per_variant)
    return ChoiceResult(k, table.variants[k], per_variant[k], "pessimistic", per_variant)


def choose_optimistic(table: DecisionTable) -> ChoiceResult:
    """Best best case: maximize the row maximum."""
    per_variant = tuple(max(row) for row in table.values)
    k = _argmax_lowest(per_variant)
    return ChoiceResult(k, table.variants[k], per_variant[k], "optimistic", per_variant)


def choose_pragmatic(table: DecisionTable, probabilities: Optional[Sequence[float]] = None) -> ChoiceResult:
    """Maximize expected preference under the situation probabilities."""
    probs = probabilities if probabilities is not None else table.probabilities
    if probs is None:
        raise DecisionError("pragmatic choice needs situation probabilities")
    probs = validate_distribution(probs, expected=len(table.situations))
    per_variant = tuple(
        sum(p * v for p, v in zip(probs, row)) for row in table.values
    )
    k = _argmax_lowest(per_variant)
    return ChoiceResult(k, table.variants[k], per_variant[k], "pragmatic", per_variant)


CRITERIA = {
    "pessimistic": choose_pessimistic,
    "optimistic": choose_optimistic,
    "pragmatic": choose_pragmatic,
}


def choose(table: DecisionTable, criterion: str, probabilities=None) -> ChoiceResult:
    if criterion not in CRITERIA:
        raise DecisionError(
            "unknown criterion %r; expected one of %s" % (criterion, sorted(CRITERIA))
        )
    if criterion == "pragmatic":
        return choose_pragmatic(table, probabilities)
    return CRITERIA[criterion](table)


@dataclass
class BayesInput:
    hypotheses: list
    priors: list
    likelihoods: list
    evidence: str = ""

    def __post_init__(self):
        if len(self.priors) != len(self.hypotheses) or len(self.likelihoods) != len(self.hypotheses):
            raise DecisionError("hypotheses, priors and likelihoods must align")
        self.priors = validate_distribution(self.priors)
        self.likelihoods = [float(l) for l in self.likelihoods]
        for l in self.likelihoods:
            if not 0.0 <= l <= 1.0:
                raise DecisionError("likelihood %g outside [0, 1]" % l)


def bayes_posterior(inp: BayesInput) -> list:
    """Posterior over the hypotheses given the evidence likelihoods."""
    joint = [p * l for p, l in zip(inp.priors, inp.likelihoods)]
    denominator = sum(joint)
    if denominator <= 0.0:
        raise DecisionError("evidence impossible under all hypotheses")
    return [j / denominator for j in joint]


@dataclass
class EventNode:
    """Event-tree node: a leaf bears an outcome class, an internal node

    branches with labeled probabilities summing to one."""

    outcome: Optional[str] = None
    branches: list = field(default_factory=list)  # (label, probability, EventNode)

    def __post_init__(self):
        if self.outcome is None and not self.branches:
            raise DecisionError("node needs an outcome or branches")
        if self.outcome is not None and self.branches:
            raise DecisionError("node cannot both branch and bear an outcome")
        if self.branches:
            validate_distribution([p for _, p, _ in self.branches])


def event_tree_probability(tree: EventNode, outcome: str) -> float:
    """Sum of branch-probability products over paths ending in the outcome."""
    if tree.outcome is not None:
        return 1.0 if tree.outcome == outcome else 0.0
    return sum(p * event_tree_probability(child, outcome) for _, p, child in tree.branches)


def event_tree_outcomes(tree: EventNode) -> set:
    if tree.outcome is not None:
        return {tree.outcome}
    out = set()
    for _, _, child in tree.branches:
        out |= event_tree_outcomes(child)
    return out


def event_tree_from_relations(branches: Sequence, outcomes: Sequence) -> EventNode:
    """Build a tree from ``branch(node, child, prob)`` / ``outcome(leaf, class)`` rows.

    The root is the unique node that never appears as a child."""
    children: dict[str, list] = {}
    child_names = set()
    parents = []
    for node, child, prob in branches:
        children.setdefault(node, []).append((child, float(prob)))
        child_names.add(child)
        parents.append(node)
    outcome_of = {leaf: cls for leaf, cls in outcomes}
    if not parents:
        raise DecisionError("event tree has no branches")
    roots = [n for n in dict.fromkeys(parents) if n not in child_names]
    if len(roots) != 1:
        raise DecisionError("event tree must have exactly one root, found %d" % len(roots))

    def build(name: str) -> EventNode:
        if name in children:
            return EventNode(
                branches=[(child, prob, build(child)) for child, prob in children[name]]
            )
        if name not in outcome_of:
            raise DecisionError("leaf %r has no outcome class" % name)
        return EventNode(outcome=outcome_of[name])

    return build(roots[0])


@dataclass
class FinancialProfile:
    """The five solvency ratios entering the Z-score."""

    working_capital_to_assets: float
    retained_earnings_to_assets: float
    ebit_to_assets: float
    equity_market_value_to_liabilities: float
    sales_to_assets: float

    def ratios(self) -> tuple:
        values = (
            self.working_capital_to_assets,
            self.retained_earnings_to_assets,
            self.ebit_to_assets,
            self.equity_market_value_to_liabilities,
            self.sales_to_assets,
        )
        for v in values:
            if not math.isfinite(v):
                raise DecisionError("financial ratio %r is not finite" % v)
        return values


@dataclass(frozen=True)
class AltmanConfig:
    """Classical public coefficients and zone thresholds; overridable."""

    coefficients: tuple = (1.2, 1.4, 3.3, 0.6, 1.0)
    distress_below: float = 1.81
    safe_from: float = 2.99


DEFAULT_ALTMAN = AltmanConfig()


def altman_z(profile: FinancialProfile, config: AltmanConfig = DEFAULT_ALTMAN) -> tuple:
    """Weighted ratio sum and its zone: distress, grey or safe."""
    z = sum(c * x for c, x in zip(config.coefficients, profile.ratios()))
    if z < config.distress_below:
        zone = "distress"
    elif z < config.safe_from:
        zone = "grey"
    else:
        zone = "safe"
    return z, zone
