"""Production-event operations: restoration plans, expense sheets,

cause analysis, consequence quantification and plan correction.

Measure templates live in the experience store as facts:

    measure(m1, "to pump out water from constructions", 3).
    triggered_by(m1, flooding).
    requires(m3, m1).
    expense(m1, "pump crews", 4, "2500.00", usd).
    restores(m7, furnace1).

Templates are matched by damage tags, instantiated, and ordered by
prerequisites; measures without ordering constraints run in parallel, so an
asset is down until the last measure restoring it completes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..events import CriticalEvent, fact_name
from ..money import Money, MoneyError, sum_money
from ..store import FactStore
from ..terms import Atom, Text, Var
from ..engine import Solver


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ExpenseItem:
    label: str
    quantity: int
    unit_cost: Money

    @property
    def amount(self) -> Money:
        return self.unit_cost.scaled(self.quantity)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "quantity": self.quantity,
            "unit_cost": self.unit_cost.to_json(),
            "amount": self.amount.to_json(),
        }


@dataclass
class ExpenseSheet:
    items: list = field(default_factory=list)
    currency: str = "USD"

    def __post_init__(self):
        for item in self.items:
            if item.unit_cost.currency != self.currency:
                raise MoneyError(
                    "expense sheet in %s has an item in %s"
                    % (self.currency, item.unit_cost.currency)
                )

    @property
    def total(self) -> Money:
        return sum_money((item.amount for item in self.items), self.currency)

    def to_json(self) -> dict:
        return {
            "items": [item.to_json() for item in self.items],
            "total": self.total.to_json(),
        }


@dataclass
class RestorationMeasure:
    id: str
    description: str
    duration_days: float
    prerequisites: tuple = ()
    expenses: ExpenseSheet = field(default_factory=ExpenseSheet)
    assets: tuple = ()

    def __post_init__(self):
        if self.duration_days < 0:
            raise ScenarioError("measure %s has negative duration" % self.id)


@dataclass
class Proposition:
    kind: str  # plan-correction | reliability-improvement | new-technology | other
    description: str
    evidence: list  # references into the report (goal-tree nodes, section ids)

    def __post_init__(self):
        if not self.evidence:
            raise ScenarioError("proposition %r carries no evidence reference" % self.description)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "description": self.description,
            "evidence": list(self.evidence),
        }


@dataclass
class CauseFinding:
    version: str
    status: str  # confirmed | undeterminable | not-confirmed
    evidence: Optional[dict] = None  # goal tree of the condition proof

    def to_json(self) -> dict:
        return {"version": self.version, "status": self.status, "evidence": self.evidence}


def _natural_key(identifier: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", identifier)]


def load_measure_templates(store: FactStore) -> dict:
    """Measure templates from the experience store, keyed by id."""
    templates = {}
    for atom in store.facts("measure"):
        mid, description, duration = atom.args
        templates[mid.name] = {
            "id": mid.name,
            "description": description.value if isinstance(description, Text) else str(description),
            "duration": float(duration.value),
            "tags": set(),
            "requires": [],
            "expenses": [],
            "assets": [],
        }
    for atom in store.facts("triggered_by"):
        mid, tag = atom.args
        if mid.name in templates:
            templates[mid.name]["tags"].add(tag.name)
    for atom in store.facts("requires"):
        mid, prerequisite = atom.args
        if mid.name in templates:
            templates[mid.name]["requires"].append(prerequisite.name)
    for atom in store.facts("expense"):
        mid, label, quantity, cost, currency = atom.args
        if mid.name in templates:
            templates[mid.name]["expenses"].append(
                ExpenseItem(
                    label.value,
                    int(quantity.value),
                    Money.parse(cost.value, currency.name.upper()),
                )
            )
    for atom in store.facts("restores"):
        mid, asset = atom.args
        if mid.name in templates:
            templates[mid.name]["assets"].append(asset.name)
    return templates


def plan_restoration(event: CriticalEvent, store: FactStore) -> tuple:
    """Instantiate measures matching the event's damage tags, in dependency order.

    Returns (ordered measures, warnings)."""
    templates = load_measure_templates(store)
    tags = {fact_name(t) for t in event.tags}
    warnings = []
    selected = {
        mid: tpl for mid, tpl in templates.items() if tpl["tags"] & tags
    }
    if not selected:
        warnings.append("no restoration templates match the event tags")
        return [], warnings
    measures = {}
    for mid, tpl in selected.items():
        prerequisites = tuple(p for p in tpl["requires"] if p in selected)
        currency = tpl["expenses"][0].unit_cost.currency if tpl["expenses"] else "USD"
        measures[mid] = RestorationMeasure(
            id=mid,
            description=tpl["description"],
            duration_days=tpl["duration"],
            prerequisites=prerequisites,
            expenses=ExpenseSheet(list(tpl["expenses"]), currency),
            assets=tuple(tpl["assets"]),
        )
    ordered = _topological(measures)
    return ordered, warnings


def _topological(measures: dict) -> list:
    """Kahn's algorithm, one measure per round; ties to the least measure id."""
    pending = dict(measures)
    resolved = []
    done = set()
    while pending:
        ready = sorted(
            (mid for mid, m in pending.items() if all(p in done for p in m.prerequisites)),
            key=_natural_key,
        )
        if not ready:
            cycle = sorted(pending, key=_natural_key)
            raise ScenarioError(
                "prerequisite cycle among measures: %s" % ", ".join(cycle)
            )
        mid = ready[0]
        resolved.append(pending.pop(mid))
        done.add(mid)
    return resolved


def schedule_measures(plan: list) -> dict:
    """Start/end day per measure: start when every prerequisite completes."""
    schedule = {}
    for measure in plan:
        start = 0.0
        for prerequisite in measure.prerequisites:
            if prerequisite in schedule:
                start = max(start, schedule[prerequisite][1])
        schedule[measure.id] = (start, start + measure.duration_days)
    return schedule


def asset_downtime(plan: list, schedule: dict) -> dict:
    """Asset -> completion day of the last measure restoring it."""
    downtime = {}
    for measure in plan:
        end = schedule[measure.id][1]
        for asset in measure.assets:
            downtime[asset] = max(downtime.get(asset, 0.0), end)
    return downtime


def sum_expense_sheets(plan: list) -> ExpenseSheet:
    """One aggregate sheet, one line per measure; currencies must agree."""
    currencies = {m.expenses.currency for m in plan if m.expenses.items}
    if len(currencies) > 1:
        raise MoneyError("mixed currencies across measures: %s" % sorted(currencies))
    currency = currencies.pop() if currencies else "USD"
    items = [
        ExpenseItem(measure.description, 1, measure.expenses.total)
        for measure in plan
        if measure.expenses.items
    ]
    return ExpenseSheet(items, currency)


def analyze_causes(event: CriticalEvent, solver: Solver) -> tuple:
    """Check each declared cause version against the event measurements.

    Versions are ``cause_version/1`` facts; their conditions are
    ``cause_holds/1`` clauses solved against the session.  A version whose
    declared measurements are absent is undeterminable rather than failed.
    Returns (findings in version order, warnings)."""
    findings = []
    warnings = []
    versions = [
        s.bindings["V"]
        for s in solver.solve_all(Atom("cause_version", (Var("V"),)))
    ]
    required = {}
    for s in solver.solve_all(Atom("needs_measurement", (Var("V"), Var("M")))):
        required.setdefault(s.bindings["V"].name, []).append(s.bindings["M"].name)
    measured = {fact_name(name) for name in event.measurements}
    for version in versions:
        name = version.name
        missing = [m for m in required.get(name, []) if m not in measured]
        if missing:
            findings.append(CauseFinding(name, "undeterminable"))
            continue
        solutions = solver.solve_all(Atom("cause_holds", (version,)), max_solutions=1)
        if solutions:
            findings.append(CauseFinding(name, "confirmed", solutions[0].tree))
        else:
            findings.append(CauseFinding(name, "not-confirmed"))
    if not any(f.status == "confirmed" for f in findings):
        warnings.append("no cause version could be confirmed")
    return findings, warnings


@dataclass
class ConsequenceReport:
    lost_output: list  # {product, volume, unit, asset, downtime_days}
    sale_volume_change: Money
    penalties: Money
    breached_contracts: list
    account_payable_increase: Money
    unquantified: list
    narrative: str = ""

    @property
    def total(self) -> Money:
        return self.sale_volume_change + self.penalties + self.account_payable_increase

    def to_json(self) -> dict:
        return {
            "lost_output": list(self.lost_output),
            "sale_volume_change": self.sale_volume_change.to_json(),
            "penalties": self.penalties.to_json(),
            "breached_contracts": list(self.breached_contracts),
            "account_payable_increase": self.account_payable_increase.to_json(),
            "total": self.total.to_json(),
            "unquantified": list(self.unquantified),
            "narrative": self.narrative,
        }


def _store_money(atom_args, index_amount, index_currency) -> Money:
    return Money.parse(
        atom_args[index_amount].value, atom_args[index_currency].name.upper()
    )


def assess_consequences(
    event: CriticalEvent,
    plan: list,
    store: FactStore,
    restoration_total: Optional[Money] = None,
) -> ConsequenceReport:
    """Negative-profit analysis: lost sales, delay penalties, credit cost.

    Asset registry, prices, contracts and credit terms come from the store:
    ``asset(id, product, daily_output, unit)``, ``price(product, "300.00",
    usd)``, ``contract(id, product, delivery_day, "15000.00", usd)``,
    ``liquidity("400000.00", usd)``, ``credit_rate(0.1)``,
    ``credit_term_years(1)``."""
    schedule = schedule_measures(plan)
    downtime = asset_downtime(plan, schedule)
    registry = {}
    for atom in store.facts("asset"):
        asset_id, product, daily, unit = atom.args
        registry[asset_id.name] = (product.name, float(daily.value), unit.name)
    prices = {}
    currency = "USD"
    for atom in store.facts("price"):
        product, amount, cur = atom.args
        prices[product.name] = Money.parse(amount.value, cur.name.upper())
        currency = cur.name.upper()

    unquantified = []
    lost_output = []
    lost_by_product: dict[str, float] = {}
    affected = [fact_name(a) for a in event.affected_assets]
    for asset in affected:
        if asset not in registry:
            unquantified.append("asset %r is not in the asset registry" % asset)
            continue
        product, daily, unit = registry[asset]
        days = downtime.get(asset, 0.0)
        volume = daily * days
        lost_output.append(
            {
                "asset": asset,
                "product": product,
                "volume": volume,
                "unit": unit,
                "downtime_days": days,
            }
        )
        lost_by_product[product] = lost_by_product.get(product, 0.0) + volume

    sale_change = Money.zero(currency)
    for product, volume in sorted(lost_by_product.items()):
        if product not in prices:
            unquantified.append("no price for product %r" % product)
            continue
        sale_change = sale_change + prices[product].times(volume)

    penalties = Money.zero(currency)
    breached = []
    for atom in store.facts("contract"):
        contract_id, product, delivery_day, amount, cur = atom.args
        product_assets = [a for a, (p, _, _) in registry.items() if p == product.name]
        worst = max((downtime.get(a, 0.0) for a in product_assets), default=0.0)
        if worst > float(delivery_day.value):
            penalties = penalties + Money.parse(amount.value, cur.name.upper())
            breached.append(contract_id.name)

    account_payable = Money.zero(currency)
    if restoration_total is None:
        restoration_total = sum_expense_sheets(plan).total
    liquidity_facts = store.facts("liquidity")
    if liquidity_facts and restoration_total.minor > 0:
        liquidity = _store_money(liquidity_facts[0].args, 0, 1)
        if liquidity < restoration_total:
            need = restoration_total - liquidity
            rate_facts = store.facts("credit_rate")
            term_facts = store.facts("credit_term_years")
            if not rate_facts or not term_facts:
                unquantified.append("credit need %s but no credit terms configured" % need)
            else:
                rate = float(rate_facts[0].args[0].value)
                term = float(term_facts[0].args[0].value)
                account_payable = need.times(rate * term)

    return ConsequenceReport(
        lost_output=lost_output,
        sale_volume_change=sale_change,
        penalties=penalties,
        breached_contracts=breached,
        account_payable_increase=account_payable,
        unquantified=unquantified,
        narrative=event.narrative,
    )


def load_production_plan(store: FactStore) -> tuple:
    """Per-product period volumes: ``plan_volume(product, period, volume)``

    with ``plan_period_days(10)``; periods are 1-based in the store."""
    period_days = 10.0
    facts = store.facts("plan_period_days")
    if facts:
        period_days = float(facts[0].args[0].value)
    volumes: dict[str, dict[int, float]] = {}
    for atom in store.facts("plan_volume"):
        product, period, volume = atom.args
        volumes.setdefault(product.name, {})[int(period.value)] = float(volume.value)
    plan = {
        product: [periods[i] for i in sorted(periods)]
        for product, periods in volumes.items()
    }
    return plan, period_days


def correct_plans(
    plan_volumes: dict,
    period_days: float,
    downtime_by_product: dict,
    consequence_ref: str = "consequences",
) -> tuple:
    """Reduce per-period volumes pro rata to the downtime overlap.

    Returns (revised volumes, Proposition or None)."""
    revised = {}
    changed = False
    for product, volumes in sorted(plan_volumes.items()):
        days = downtime_by_product.get(product, 0.0)
        out = []
        for index, volume in enumerate(volumes):
            period_start = index * period_days
            period_end = (index + 1) * period_days
            overlap = max(0.0, min(days, period_end) - period_start)
            fraction = overlap / (period_end - period_start)
            corrected = max(0.0, volume * (1.0 - fraction))
            if corrected != volume:
                changed = True
            out.append(corrected)
        revised[product] = out
    proposition = None
    if changed:
        proposition = Proposition(
            "plan-correction",
            "reduce production plan volumes for downtime overlap",
            [consequence_ref],
        )
    return revised, proposition


def propose_reliability(findings: list, store: FactStore) -> list:
    """One proposition per confirmed cause with an improvement template."""
    templates = {}
    for atom in store.facts("reliability_proposal"):
        version, text = atom.args
        templates.setdefault(version.name, []).append(text.value)
    out = []
    for finding in findings:
        if finding.status != "confirmed":
            continue
        for text in templates.get(finding.version, []):
            out.append(
                Proposition(
                    "reliability-improvement",
                    text,
                    ["cause:%s" % finding.version],
                )
            )
    return out
