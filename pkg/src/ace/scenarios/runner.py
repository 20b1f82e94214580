"""Scenario dispatcher: poses the top goal to the inference engine and lets

the knowledge-base clauses route the work.  Each adaptation subgoal is a
builtin that runs the matching operation and records its output; the report
aggregates the recorded sections with the proof's goal tree attached.

A scenario package is a directory holding ``rules.kb`` (the routing and
cause-analysis clauses) and ``experience.facts`` (measure templates, asset
registry, prices, cost structures, threat models).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..decisions import DecisionError, event_tree_from_relations, event_tree_probability, bayes_posterior, BayesInput
from ..engine import Solver, standard_registry
from ..events import CriticalEvent, fact_name
from ..kblang import load_kb
from ..store import FactStore, load_store
from ..terms import Atom, Const, HornClause, KnowledgeBase, Num, Text
from . import market as market_ops
from . import regional as regional_ops
from .restoration import (
    Proposition,
    ScenarioError,
    analyze_causes,
    assess_consequences,
    asset_downtime,
    correct_plans,
    load_production_plan,
    plan_restoration,
    propose_reliability,
    schedule_measures,
    sum_expense_sheets,
)

PACKAGE_DIR = Path(__file__).parent / "packages"

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    """Named constants the knowledge bases must never hard-code."""

    threat_elevated: float = 0.05  # low below, elevated from here
    threat_high: float = 0.25  # high from here
    new_technology_factor: float = 1.2
    choice_criterion: str = "pragmatic"
    forecast_horizon: int = 6
    fx_order: int = 1


@dataclass
class ScenarioPackage:
    name: str
    kb: KnowledgeBase
    store: FactStore


def available_packages(directory: Optional[Path] = None) -> list:
    directory = directory or PACKAGE_DIR
    if not directory.is_dir():
        return []
    return sorted(p.name for p in directory.iterdir() if (p / "rules.kb").is_file())


def load_package(name: str, directory: Optional[Path] = None) -> ScenarioPackage:
    directory = directory or PACKAGE_DIR
    root = directory / name
    rules = root / "rules.kb"
    if not rules.is_file():
        raise ScenarioError("no KB package named %r" % name)
    kb, inline_store = load_kb(rules)
    store = FactStore()
    store.merge(inline_store)
    facts_path = root / "experience.facts"
    if facts_path.is_file():
        store.merge(load_store(facts_path))
    return ScenarioPackage(name, kb, store)


class Recorder:
    """Mutable report builder the scenario builtins write into."""

    def __init__(self):
        self.sections: dict = {}
        self.propositions: list = []
        self.warnings: list = []
        self.branch: Optional[str] = None
        self.plan: list = []
        self.cause_findings: list = []

    def warn(self, messages) -> None:
        if isinstance(messages, str):
            messages = [messages]
        self.warnings.extend(messages)

    def market(self) -> dict:
        return self.sections.setdefault("market", {})

    def regional(self) -> dict:
        return self.sections.setdefault("regional", {})


def event_fact_clauses(event: CriticalEvent) -> list:
    """Event document as knowledge-base facts the routing clauses match on."""
    eid = Text(event.id)
    clauses = [
        HornClause(Atom("event_category", (Const(fact_name(event.category)),))),
        HornClause(Atom("event_subtype", (Const(fact_name(event.subtype)),))),
    ]
    status_pred = "occurred_event" if event.status == "occurred" else "signal_event"
    clauses.append(HornClause(Atom(status_pred, (eid,))))
    subtype_preds = {
        "new-competitive-goods": "competitive_goods_event",
        "new-segment": "segment_event",
        "partner-financial-change": "partner_event",
        "fx-change": "fx_event",
        "customs-change": "customs_event",
        "tax-change": "tax_event",
        "energy-crisis": "energy_event",
        "political-crisis": "political_event",
        "ecocatastrophe": "eco_event",
    }
    if event.subtype in subtype_preds:
        clauses.append(HornClause(Atom(subtype_preds[event.subtype], (eid,))))
    for tag in event.tags:
        clauses.append(HornClause(Atom("event_tag", (Const(fact_name(tag)),))))
    for asset in event.affected_assets:
        clauses.append(HornClause(Atom("affected_asset", (Const(fact_name(asset)),))))
    for name, measurement in sorted(event.measurements.items()):
        clauses.append(
            HornClause(
                Atom("measured", (Const(fact_name(name)), Num(measurement.value)))
            )
        )
    return clauses


def assess_threat(method: str, model, config: ScenarioConfig, outcome: str = "emergency") -> tuple:
    """Probability of the threat outcome plus its configured level band."""
    if method == "event-tree":
        probability = event_tree_probability(model, outcome)
    elif method == "bayes":
        bayes_input, emergency_labels = model
        posterior = bayes_posterior(bayes_input)
        probability = sum(
            p
            for label, p in zip(bayes_input.hypotheses, posterior)
            if label in emergency_labels
        )
    else:
        raise ScenarioError("unknown threat method %r" % method)
    if probability < config.threat_elevated:
        level = "low"
    elif probability < config.threat_high:
        level = "elevated"
    else:
        level = "high"
    return probability, level


def _threat_model_from_store(store: FactStore):
    branches = [
        (a.args[0].name, a.args[1].name, float(a.args[2].value))
        for a in store.facts("branch")
    ]
    outcomes = [(a.args[0].name, a.args[1].name) for a in store.facts("outcome")]
    if branches:
        return "event-tree", event_tree_from_relations(branches, outcomes)
    priors = {a.args[0].name: float(a.args[1].value) for a in store.facts("threat_prior")}
    likelihoods = {
        a.args[0].name: float(a.args[1].value) for a in store.facts("threat_likelihood")
    }
    if priors and set(priors) == set(likelihoods):
        labels = sorted(priors)
        emergency = {a.args[0].name for a in store.facts("threat_emergency")}
        bayes_input = BayesInput(
            labels, [priors[l] for l in labels], [likelihoods[l] for l in labels]
        )
        return "bayes", (bayes_input, emergency)
    raise ScenarioError(
        "no threat model in the experience data: need branch/outcome relations "
        "or threat_prior/threat_likelihood facts"
    )


# -- scenario builtins --------------------------------------------------------


def _one(call):
    """Builtin succeeded without new bindings."""
    yield call.subst


def make_scenario_registry(
    event: CriticalEvent,
    recorder: Recorder,
    config: ScenarioConfig,
    kb: KnowledgeBase,
    store: FactStore,
):
    """Standard registry plus the adaptation subgoals as builtins."""
    registry = standard_registry()

    def sub_solver() -> Solver:
        return Solver(kb, store=store, registry=standard_registry())

    def bi_estimate_threat(call):
        method, model = _threat_model_from_store(store)
        outcome_facts = store.facts("threat_outcome")
        outcome = outcome_facts[0].args[0].name if outcome_facts else "emergency"
        try:
            probability, level = assess_threat(method, model, config, outcome)
        except DecisionError as exc:
            raise ScenarioError("threat assessment failed: %s" % exc) from exc
        recorder.branch = "threat"
        recorder.sections["threat"] = {
            "method": method,
            "outcome": outcome,
            "probability": probability,
            "level": level,
        }
        return _one(call)

    def bi_assess_threat_consequences(call):
        tags = {fact_name(t) for t in event.tags}
        notes = []
        for atom in store.facts("threat_consequence"):
            tag, text = atom.args
            if not tags or tag.name in tags:
                notes.append(text.value)
        section = recorder.sections.setdefault("preventive", {})
        section["consequences"] = notes
        return _one(call)

    def bi_propose_preventive(call):
        tags = {fact_name(t) for t in event.tags}
        section = recorder.sections.setdefault("preventive", {})
        proposed = []
        for atom in store.facts("preventive_measure"):
            tag, text = atom.args
            if not tags or tag.name in tags:
                proposed.append(text.value)
                recorder.propositions.append(
                    Proposition("other", text.value, ["threat"])
                )
        section["proposals"] = proposed
        return _one(call)

    def bi_describe_event(call):
        recorder.branch = recorder.branch or "occurred"
        recorder.sections["description"] = {
            "title": event.title,
            "tags": [fact_name(t) for t in event.tags],
            "affected_assets": [fact_name(a) for a in event.affected_assets],
            "narrative_present": bool(event.narrative),
        }
        return _one(call)

    def bi_plan_recovery(call):
        plan, warnings = plan_restoration(event, store)
        recorder.warn(warnings)
        recorder.plan = plan
        schedule = schedule_measures(plan)
        aggregate = sum_expense_sheets(plan)
        recorder.sections["measures"] = [
            {
                "id": m.id,
                "description": m.description,
                "duration_days": m.duration_days,
                "prerequisites": list(m.prerequisites),
                "assets": list(m.assets),
                "start_day": schedule[m.id][0],
                "end_day": schedule[m.id][1],
                "expenses": m.expenses.to_json(),
            }
            for m in plan
        ]
        recorder.sections["expense_total"] = aggregate.to_json()
        return _one(call)

    def bi_find_causes(call):
        findings, warnings = analyze_causes(event, sub_solver())
        recorder.warn(warnings)
        recorder.cause_findings = findings
        recorder.sections["causes"] = [f.to_json() for f in findings]
        return _one(call)

    def bi_quantify_consequences(call):
        report = assess_consequences(event, recorder.plan, store)
        recorder.sections["consequences"] = report.to_json()
        return _one(call)

    def bi_revise_plans(call):
        plan_volumes, period_days = load_production_plan(store)
        schedule = schedule_measures(recorder.plan)
        downtime = asset_downtime(recorder.plan, schedule)
        registry_products = {}
        for atom in store.facts("asset"):
            asset_id, product = atom.args[0].name, atom.args[1].name
            registry_products.setdefault(product, []).append(asset_id)
        affected = {fact_name(a) for a in event.affected_assets}
        downtime_by_product = {}
        for product, assets in registry_products.items():
            days = max(
                (downtime.get(a, 0.0) for a in assets if a in affected), default=0.0
            )
            downtime_by_product[product] = days
        revised, proposition = correct_plans(plan_volumes, period_days, downtime_by_product)
        recorder.sections["plan_correction"] = {
            "period_days": period_days,
            "original": plan_volumes,
            "revised": revised,
            "downtime_by_product": downtime_by_product,
        }
        if proposition is not None:
            recorder.propositions.append(proposition)
        return _one(call)

    def bi_improve_reliability(call):
        proposals = propose_reliability(recorder.cause_findings, store)
        recorder.propositions.extend(proposals)
        return _one(call)

    # market subgoals

    def bi_assess_consumer_value(call):
        fragment, warnings = market_ops.consumer_value_section(store, config)
        recorder.warn(warnings)
        recorder.market()["consumer_value"] = fragment
        return _one(call)

    def bi_assess_sales_impact(call):
        consumer_value = recorder.market().get("consumer_value")
        if consumer_value is None:
            raise ScenarioError("sales impact needs the consumer-value assessment first")
        fragment, warnings = market_ops.sales_impact_section(store, consumer_value)
        recorder.warn(warnings)
        recorder.market()["sales_impact"] = fragment
        return _one(call)

    def bi_prepare_plan_information(call):
        recorder.market()["plan_info"] = market_ops.plan_information_section(
            recorder.market()
        )
        return _one(call)

    def bi_consider_new_technology(call):
        consumer_value = recorder.market().get("consumer_value")
        if consumer_value is None:
            raise ScenarioError("technology proposals need the consumer-value assessment")
        recorder.propositions.extend(
            market_ops.technology_propositions(consumer_value, config)
        )
        return _one(call)

    def bi_analyze_segment(call):
        fragment, warnings = market_ops.segment_analysis_section(store)
        recorder.warn(warnings)
        recorder.market()["segment_analysis"] = fragment
        return _one(call)

    def bi_estimate_segment_sales(call):
        fragment, warnings = market_ops.segment_sales_section(store)
        recorder.warn(warnings)
        recorder.market()["sales_estimate"] = fragment
        return _one(call)

    def bi_assess_financial_state(call):
        fragment, warnings = market_ops.financial_state_section(store)
        recorder.warn(warnings)
        recorder.market()["financial_state"] = fragment
        return _one(call)

    def bi_assess_partner_consequences(call):
        financial_state = recorder.market().get("financial_state")
        if financial_state is None:
            raise ScenarioError("consequence assessment needs the financial state first")
        fragment, warnings = market_ops.partner_consequences_section(
            store, financial_state, config
        )
        recorder.warn(warnings)
        recorder.market()["consequences"] = fragment
        return _one(call)

    def bi_prepare_other_propositions(call):
        financial_state = recorder.market().get("financial_state")
        if financial_state is not None:
            recorder.propositions.extend(
                market_ops.other_partner_propositions(financial_state)
            )
        return _one(call)

    # regional subgoals

    def bi_predict_rate_change(call):
        fragment, warnings = regional_ops.fx_forecast_section(event, store, config)
        recorder.warn(warnings)
        recorder.regional()["forecast"] = fragment
        return _one(call)

    def bi_assess_cost_consequences(call):
        forecast = recorder.regional().get("forecast")
        params = regional_ops.change_parameters(event, store, forecast)
        if event.subtype != "fx-change":
            recorder.regional()["announced_change"] = {
                k: v for k, v in params.items() if k != "category"
            }
        fragment, warnings = regional_ops.cost_consequences_fragment(
            store, params["category"], params["factor"], params["net_price_factor"]
        )
        recorder.warn(warnings)
        recorder.regional()["cost_consequences"] = fragment
        recorder.propositions.extend(regional_ops.unprofitability_propositions(fragment))
        return _one(call)

    def bi_assess_political_consequences(call):
        fragment, propositions = regional_ops.political_section()
        recorder.regional()["announced_change"] = {"kind": "political"}
        recorder.regional()["expected_consequences"] = fragment
        recorder.propositions.extend(propositions)
        return _one(call)

    for name, handler in [
        ("estimate_threat", bi_estimate_threat),
        ("assess_threat_consequences", bi_assess_threat_consequences),
        ("propose_preventive", bi_propose_preventive),
        ("describe_event", bi_describe_event),
        ("plan_recovery", bi_plan_recovery),
        ("find_causes", bi_find_causes),
        ("quantify_consequences", bi_quantify_consequences),
        ("revise_plans", bi_revise_plans),
        ("improve_reliability", bi_improve_reliability),
        ("assess_consumer_value", bi_assess_consumer_value),
        ("assess_sales_impact", bi_assess_sales_impact),
        ("prepare_plan_information", bi_prepare_plan_information),
        ("consider_new_technology", bi_consider_new_technology),
        ("analyze_segment", bi_analyze_segment),
        ("estimate_segment_sales", bi_estimate_segment_sales),
        ("assess_financial_state", bi_assess_financial_state),
        ("assess_partner_consequences", bi_assess_partner_consequences),
        ("prepare_other_propositions", bi_prepare_other_propositions),
        ("predict_rate_change", bi_predict_rate_change),
        ("assess_cost_consequences", bi_assess_cost_consequences),
        ("assess_political_consequences", bi_assess_political_consequences),
    ]:
        registry.register(name, 1, "+", handler)
    return registry


TOP_GOAL = "handle_event"


def scenario_solver(
    event: CriticalEvent,
    package: ScenarioPackage,
    config: Optional[ScenarioConfig] = None,
):
    """Session wiring: (solver, goal, recorder) ready for solve()."""
    config = config or ScenarioConfig()
    event_facts = event_fact_clauses(event)
    session_kb = KnowledgeBase(
        clauses=list(package.kb.clauses) + event_facts,
        prop_rules=list(package.kb.prop_rules),
        name=package.name,
    )
    session_store = package.store.copy()
    for clause in event_facts:
        session_store.assert_fact(clause.head)
    recorder = Recorder()
    registry = make_scenario_registry(event, recorder, config, session_kb, session_store)
    solver = Solver(session_kb, store=session_store, registry=registry)
    goal = Atom(TOP_GOAL, (Text(event.id),))
    return solver, goal, recorder


def assemble_report(event: CriticalEvent, recorder: Recorder, tree: Optional[dict]) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "event": event.to_json(),
        "category": event.category,
        "subtype": event.subtype,
    }
    if recorder.branch is not None:
        report["branch"] = recorder.branch
    report.update(recorder.sections)
    report["propositions"] = [p.to_json() for p in recorder.propositions]
    report["warnings"] = list(recorder.warnings)
    report["goal_tree"] = tree
    return report


def run_scenario(
    event: CriticalEvent,
    package: ScenarioPackage,
    config: Optional[ScenarioConfig] = None,
    answers: Optional[list] = None,
) -> dict:
    """Drive one scenario to completion, answering asks from a script."""
    solver, goal, recorder = scenario_solver(event, package, config)
    solution = solver.first_solution(goal, answers=answers)
    if solution is None:
        raise ScenarioError(
            "the %r knowledge base could not prove %s for event %r"
            % (package.name, TOP_GOAL, event.id)
        )
    return assemble_report(event, recorder, solution.tree)
