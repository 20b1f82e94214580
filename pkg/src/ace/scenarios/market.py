"""Market-event operations: competitive goods, new segments, partner finances.

Each function covers one subgoal of the market adaptation rules, so the
inference engine can call them separately and the goal tree shows which
assessments ran.  ``evaluate_market_event`` composes them for direct use.

Numeric inputs come from store tables and relations: consumer-value training
samples, attribute rows, criteria weights, partner ratios and the
partner-consequence decision table.
"""

from __future__ import annotations

from typing import Optional

from ..decisions import (
    DecisionError,
    DecisionTable,
    FinancialProfile,
    altman_z,
    choose,
)
from ..events import CriticalEvent
from ..forecast import fit_regression, predict_regression
from ..store import FactStore, StoreError
from .restoration import Proposition, ScenarioError

ZONE_RANK = {"safe": 0, "grey": 1, "distress": 2}


def _require_table(store: FactStore, name: str, context: str):
    try:
        return store.table(name)
    except StoreError as exc:
        raise ScenarioError("%s: %s" % (context, exc)) from exc


def _regression_from_table(table, target_column: str, context: str):
    if target_column not in table.columns:
        raise ScenarioError(
            "%s: table %r lacks target column %r" % (context, table.name, target_column)
        )
    target_index = table.columns.index(target_column)
    samples = []
    for row in table.rows:
        inputs = tuple(v for i, v in enumerate(row) if i != target_index)
        samples.append((inputs, row[target_index]))
    return fit_regression(samples)


# -- new competitive goods ----------------------------------------------------


def consumer_value_section(store: FactStore, config) -> tuple:
    """Regression of consumer value on good attributes, applied to the new

    competitive goods and to our own good."""
    warnings = []
    training = _require_table(store, "consumer_value_data", "consumer value assessment")
    model, diagnostics = _regression_from_table(training, "value", "consumer value assessment")
    competitor_rows = _require_table(
        store, "competitor_attributes", "consumer value assessment"
    ).rows
    own_rows = _require_table(store, "own_attributes", "consumer value assessment").rows
    if not competitor_rows or not own_rows:
        raise ScenarioError("attribute tables must hold at least one row each")
    competitor_values = []
    for row in competitor_rows:
        value, extrapolating = predict_regression(model, tuple(row))
        competitor_values.append(value)
        if extrapolating:
            warnings.append("competitor attributes outside the training range")
    own_value, _ = predict_regression(model, tuple(own_rows[0]))
    fragment = {
        "competitor": competitor_values,
        "best_competitor": max(competitor_values),
        "own": own_value,
        "fit_r_squared": diagnostics.r_squared,
    }
    return fragment, warnings


def sales_impact_section(store: FactStore, consumer_value: dict) -> tuple:
    """Sales regression evaluated at the competitor's consumer value."""
    impact_table = _require_table(store, "sales_impact_data", "sales impact assessment")
    model, _ = _regression_from_table(impact_table, "own_sales", "sales impact assessment")
    predicted, _ = predict_regression(model, (consumer_value["best_competitor"],))
    baseline, _ = predict_regression(model, (consumer_value["own"],))
    fragment = {
        "predicted_sales": predicted,
        "baseline_sales": baseline,
        "change": predicted - baseline,
    }
    return fragment, []


def technology_propositions(consumer_value: dict, config) -> list:
    """New-technology proposition when the competitor value clears the bar."""
    best = consumer_value["best_competitor"]
    own = consumer_value["own"]
    if best > config.new_technology_factor * own:
        return [
            Proposition(
                "new-technology",
                "evaluate adopting new technology: competitor consumer value "
                "%.3g exceeds %.2f x own %.3g" % (best, config.new_technology_factor, own),
                ["market:consumer_value"],
            )
        ]
    return []


# -- new market segment -------------------------------------------------------


def segment_analysis_section(store: FactStore) -> tuple:
    """Weighted criteria score for the new segment."""
    warnings = []
    criteria = _require_table(store, "segment_criteria", "segment analysis")
    weights = criteria.column("weight")
    scores = criteria.column("score")
    total_weight = sum(weights)
    if total_weight == 0:
        warnings.append("segment criteria weights are all zero")
    fragment = {
        "score": sum(w * s for w, s in zip(weights, scores)),
        "total_weight": total_weight,
        "criteria_count": len(criteria.rows),
    }
    return fragment, warnings


def segment_sales_section(store: FactStore) -> tuple:
    """Sales-volume estimate for the segment from the uploaded regression data."""
    warnings = []
    sales_table = _require_table(store, "segment_sales_data", "segment sales estimate")
    model, diagnostics = _regression_from_table(sales_table, "sales", "segment sales estimate")
    features = _require_table(store, "segment_features", "segment sales estimate").rows
    if not features:
        raise ScenarioError("segment_features table is empty")
    estimate, extrapolating = predict_regression(model, tuple(features[0]))
    if extrapolating:
        warnings.append("segment features outside the training range")
    fragment = {"volume": estimate, "fit_r_squared": diagnostics.r_squared}
    return fragment, warnings


# -- partner financial change -------------------------------------------------


def financial_state_section(store: FactStore) -> tuple:
    """Altman Z-score and zone for every ``financial_profile`` fact."""
    profiles = store.facts("financial_profile")
    if not profiles:
        raise ScenarioError("no financial_profile facts for partner assessment")
    states = []
    worst = "safe"
    for atom in profiles:
        name = atom.args[0].name
        ratios = [float(t.value) for t in atom.args[1:6]]
        z, zone = altman_z(FinancialProfile(*ratios))
        states.append({"partner": name, "z_score": z, "zone": zone})
        if ZONE_RANK[zone] > ZONE_RANK[worst]:
            worst = zone
    return {"partners": states, "worst_zone": worst}, []


def partner_consequences_section(store: FactStore, financial_state: dict, config) -> tuple:
    """Decision-table pick of the response when a partner left the safe zone."""
    warnings = []
    if financial_state["worst_zone"] == "safe":
        return {"note": "all partners in the safe zone"}, warnings
    table = decision_table_from_store(store, "partner_consequences", warnings)
    if table is None:
        return {"note": "no consequence table uploaded"}, warnings
    try:
        result = choose(table, config.choice_criterion, table.probabilities)
    except DecisionError as exc:
        warnings.append("consequence choice failed: %s" % exc)
        return {"note": "consequence choice failed"}, warnings
    fragment = {
        "criterion": result.criterion,
        "variant": result.label,
        "variant_index": result.index,
        "value": result.value,
        "per_variant": list(result.per_variant),
        "table": {
            "variants": list(table.variants),
            "situations": list(table.situations),
            "values": [list(row) for row in table.values],
            "probabilities": list(table.probabilities) if table.probabilities else None,
        },
    }
    return fragment, warnings


def other_partner_propositions(financial_state: dict) -> list:
    out = []
    for state in financial_state["partners"]:
        if state["zone"] == "distress":
            out.append(
                Proposition(
                    "other",
                    "review exposure to partner %s (financial distress)" % state["partner"],
                    ["market:financial_state"],
                )
            )
    return out


def plan_information_section(section: dict) -> dict:
    """Plan-correction inputs derived from whichever assessment ran."""
    if "sales_impact" in section:
        return {
            "recommended_sales_volume": section["sales_impact"]["predicted_sales"],
            "basis": "sales_impact",
        }
    if "sales_estimate" in section:
        return {
            "additional_sales_volume": section["sales_estimate"]["volume"],
            "basis": "sales_estimate",
        }
    if "financial_state" in section:
        return {
            "replan_required": section["financial_state"]["worst_zone"] != "safe",
            "basis": "consequences",
        }
    return {"basis": "none"}


def decision_table_from_store(
    store: FactStore, name: str, warnings: list
) -> Optional[DecisionTable]:
    """Numeric table as a decision table; ``<name>_probs`` adds probabilities."""
    try:
        table = store.table(name)
    except StoreError:
        warnings.append("no %r decision table uploaded" % name)
        return None
    probabilities = None
    try:
        probs_table = store.table(name + "_probs")
        if probs_table.rows:
            probabilities = list(probs_table.rows[0])
    except StoreError:
        probabilities = None
    return DecisionTable(
        ["v%d" % (i + 1) for i in range(len(table.rows))],
        list(table.columns),
        [list(row) for row in table.rows],
        probabilities,
    )


def evaluate_market_event(event: CriticalEvent, store: FactStore, config) -> tuple:
    """One-shot composition of the subgoal sections for the event's subtype.

    Returns (section, propositions, warnings)."""
    warnings: list = []
    propositions: list = []
    section: dict = {}
    if event.subtype == "new-competitive-goods":
        fragment, w = consumer_value_section(store, config)
        section["consumer_value"] = fragment
        warnings += w
        fragment, w = sales_impact_section(store, section["consumer_value"])
        section["sales_impact"] = fragment
        warnings += w
        section["plan_info"] = plan_information_section(section)
        propositions += technology_propositions(section["consumer_value"], config)
    elif event.subtype == "new-segment":
        fragment, w = segment_analysis_section(store)
        section["segment_analysis"] = fragment
        warnings += w
        fragment, w = segment_sales_section(store)
        section["sales_estimate"] = fragment
        warnings += w
        section["plan_info"] = plan_information_section(section)
    elif event.subtype == "partner-financial-change":
        fragment, w = financial_state_section(store)
        section["financial_state"] = fragment
        warnings += w
        fragment, w = partner_consequences_section(store, section["financial_state"], config)
        section["consequences"] = fragment
        warnings += w
        section["plan_info"] = plan_information_section(section)
        propositions += other_partner_propositions(section["financial_state"])
    else:
        raise ScenarioError("unsupported market subtype %r" % event.subtype)
    return section, propositions, warnings
