"""Regional-event operations: exchange-rate shocks, customs/tax/energy cost

changes, political crises.  The common core is expense accounting: per-product
unit costs split into components (imported and domestic), materials, labour,
energy and logistics, recomputed under the announced or forecast change to
flag goods that become unprofitable.  Ecocatastrophes reuse the production
pipeline and never reach this module.
"""

from __future__ import annotations

from ..events import CriticalEvent
from ..forecast import fit_dynamical, simulate_dynamical
from ..money import Money
from ..store import FactStore, StoreError
from .restoration import Proposition, ScenarioError

COST_CATEGORIES = (
    "components_imported",
    "components_domestic",
    "materials",
    "labour",
    "energy",
    "logistics",
)


def load_cost_structures(store: FactStore) -> tuple:
    """Per-product costs from ``unit_cost(product, category, "5.00", usd)``

    and prices from ``price(product, "10.00", usd)``.
    Returns (costs dict, prices dict, warnings)."""
    warnings = []
    costs: dict = {}
    for atom in store.facts("unit_cost"):
        product, category, amount, currency = atom.args
        if category.name not in COST_CATEGORIES:
            warnings.append(
                "unknown cost category %r for product %r" % (category.name, product.name)
            )
            continue
        costs.setdefault(product.name, {})[category.name] = Money.parse(
            amount.value, currency.name.upper()
        )
    prices = {}
    for atom in store.facts("price"):
        product, amount, currency = atom.args
        prices[product.name] = Money.parse(amount.value, currency.name.upper())
    return costs, prices, warnings


def _unit_total(cost: dict) -> Money:
    currency = next(iter(cost.values())).currency
    total = Money.zero(currency)
    for category in COST_CATEGORIES:
        if category in cost:
            total = total + cost[category]
    return total


def cost_consequences_fragment(
    store: FactStore, scale_category, factor: float, net_price_factor: float = 1.0
) -> tuple:
    """Rescale one cost category and flag products whose unit cost reaches

    the (possibly tax-reduced) price.  Returns (fragment, warnings)."""
    costs, prices, warnings = load_cost_structures(store)
    rows = []
    for product in sorted(costs):
        cost = costs[product]
        if product not in prices:
            warnings.append("product %r skipped: no price" % product)
            continue
        old_total = _unit_total(cost)
        adjusted = dict(cost)
        if scale_category is not None and scale_category in adjusted:
            adjusted[scale_category] = adjusted[scale_category].times(factor)
        new_total = _unit_total(adjusted)
        price = prices[product]
        effective = price.times(net_price_factor) if net_price_factor != 1.0 else price
        rows.append(
            {
                "product": product,
                "old_unit_cost": old_total.to_json(),
                "new_unit_cost": new_total.to_json(),
                "price": price.to_json(),
                "effective_price": effective.to_json(),
                "unprofitable": not (new_total < effective),
            }
        )
    fragment = {
        "scaled_category": scale_category,
        "factor": factor,
        "products": rows,
        "unprofitable": [r["product"] for r in rows if r["unprofitable"]],
    }
    return fragment, warnings


def _fact_number(store: FactStore, name: str, default=None):
    facts = store.facts(name)
    if facts:
        return float(facts[0].args[0].value)
    return default


def fx_forecast_section(event: CriticalEvent, store: FactStore, config) -> tuple:
    """Fit the rate recurrence on the uploaded history and roll it forward."""
    try:
        history_table = store.table("fx_history")
    except StoreError as exc:
        raise ScenarioError("fx forecast: %s" % exc) from exc
    rates = history_table.column("rate")
    if len(rates) < config.fx_order + 2:
        raise ScenarioError(
            "fx forecast: history of %d points is too short for order %d"
            % (len(rates), config.fx_order)
        )
    model, diagnostics = fit_dynamical(rates, order=config.fx_order)
    horizon = int(event.measurement("forecast_horizon") or config.forecast_horizon)
    forecast = simulate_dynamical(model, rates, horizon=horizon)
    fragment = {
        "rates": forecast,
        "final_rate": forecast[-1],
        "base_rate": _fact_number(store, "base_fx_rate", rates[-1]),
        "history_points": len(rates),
        "horizon": horizon,
        "fit_r_squared": diagnostics.r_squared,
    }
    return fragment, []


def change_parameters(event: CriticalEvent, store: FactStore, forecast: dict = None) -> dict:
    """Scaled category, factor and price factor for the event's subtype."""
    subtype = event.subtype
    if subtype == "fx-change":
        if forecast is None:
            raise ScenarioError("fx change needs the rate forecast first")
        base = forecast["base_rate"]
        if base == 0:
            raise ScenarioError("fx forecast: base rate is zero")
        return {
            "kind": "fx",
            "category": "components_imported",
            "factor": forecast["final_rate"] / base,
            "net_price_factor": 1.0,
        }
    if subtype == "customs-change":
        new_rate = event.measurement("new_customs_rate")
        if new_rate is None:
            raise ScenarioError("customs change: measurement new_customs_rate is required")
        old_rate = _fact_number(store, "customs_rate", 0.0)
        return {
            "kind": "customs",
            "category": "components_imported",
            "factor": (1.0 + new_rate) / (1.0 + old_rate),
            "net_price_factor": 1.0,
            "old_rate": old_rate,
            "new_rate": new_rate,
        }
    if subtype == "tax-change":
        new_rate = event.measurement("new_tax_rate")
        if new_rate is None:
            raise ScenarioError("tax change: measurement new_tax_rate is required")
        return {
            "kind": "tax",
            "category": None,
            "factor": 1.0,
            "net_price_factor": 1.0 - new_rate,
            "new_rate": new_rate,
        }
    if subtype == "energy-crisis":
        factor = event.measurement("energy_cost_factor")
        if factor is None:
            raise ScenarioError("energy crisis: measurement energy_cost_factor is required")
        return {
            "kind": "energy",
            "category": "energy",
            "factor": factor,
            "net_price_factor": 1.0,
        }
    raise ScenarioError("no cost-change parameters for subtype %r" % subtype)


def political_section() -> tuple:
    """Qualitative template: expected sales decrease and logistic problems."""
    fragment = {
        "sales": "decrease expected in the affected region",
        "logistics": "supply and delivery routes may be disrupted",
        "quantitative": False,
    }
    proposition = Proposition(
        "other",
        "monitor the political situation and prepare alternative logistics",
        ["regional:expected_consequences"],
    )
    return fragment, [proposition]


def unprofitability_propositions(fragment: dict) -> list:
    flagged = fragment["unprofitable"]
    if not flagged:
        return []
    return [
        Proposition(
            "plan-correction",
            "rework pricing or output for unprofitable goods: %s" % ", ".join(flagged),
            ["regional:cost_consequences"],
        )
    ]


def evaluate_regional_event(event: CriticalEvent, store: FactStore, config) -> tuple:
    """One-shot composition for fx/customs/tax/energy/political subtypes.

    Returns (section, propositions, warnings)."""
    warnings: list = []
    propositions: list = []
    section: dict = {}
    if event.subtype == "political-crisis":
        fragment, props = political_section()
        section["announced_change"] = {"kind": "political"}
        section["expected_consequences"] = fragment
        propositions += props
        return section, propositions, warnings
    forecast = None
    if event.subtype == "fx-change":
        forecast, w = fx_forecast_section(event, store, config)
        section["forecast"] = forecast
        warnings += w
    params = change_parameters(event, store, forecast)
    if event.subtype != "fx-change":
        section["announced_change"] = {
            k: v for k, v in params.items() if k not in ("category",)
        }
    fragment, w = cost_consequences_fragment(
        store, params["category"], params["factor"], params["net_price_factor"]
    )
    section["cost_consequences"] = fragment
    warnings += w
    propositions += unprofitability_propositions(fragment)
    return section, propositions, warnings
