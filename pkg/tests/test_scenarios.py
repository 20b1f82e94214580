import json
import random
from pathlib import Path

import pytest

from ace.events import EventValidationError, validate_event
from ace.money import Money, MoneyError
from ace.scenarios import (
    ExpenseItem,
    ExpenseSheet,
    Proposition,
    RestorationMeasure,
    ScenarioError,
    correct_plans,
    load_package,
    plan_restoration,
    run_scenario,
    schedule_measures,
    sum_expense_sheets,
)
from ace.scenarios.restoration import asset_downtime
from ace.scenarios.runner import ScenarioConfig, assess_threat
from ace.decisions import BayesInput, EventNode

FIXTURES = Path(__file__).parent / "fixtures"


def load_event(name):
    return validate_event(json.loads((FIXTURES / name).read_text()))


@pytest.fixture(scope="module")
def production():
    return load_package("production")


@pytest.fixture(scope="module")
def market():
    return load_package("market")


@pytest.fixture(scope="module")
def region():
    return load_package("region")


class TestMoney:
    def test_parse_and_format(self):
        assert Money.parse("100.50").text == "100.50"
        assert Money.parse("100.5").minor == 10050
        assert Money.parse("7").text == "7.00"

    def test_addition_exact(self):
        assert (Money.parse("100.50") + Money.parse("49.50")).text == "150.00"

    def test_mixed_currency_rejected(self):
        with pytest.raises(MoneyError, match="mixed"):
            Money.parse("1.00", "USD") + Money.parse("1.00", "EUR")

    def test_interest_calculation(self):
        need = Money.parse("600000.00")
        assert need.times(0.10).text == "60000.00"


class TestEventValidation:
    def test_valid_event(self):
        event = load_event("blast_furnace_event.json")
        assert event.category == "production"
        assert event.measurement("gas_concentration") == pytest.approx(6.2)

    def test_bad_subtype_for_category(self):
        doc = json.loads((FIXTURES / "blast_furnace_event.json").read_text())
        doc["subtype"] = "fx-change"
        with pytest.raises(EventValidationError) as err:
            validate_event(doc)
        assert any(field == "subtype" for field, _ in err.value.errors)

    def test_missing_fields_itemized(self):
        with pytest.raises(EventValidationError) as err:
            validate_event({"measurements": {"x": "bad"}})
        fields = [field for field, _ in err.value.errors]
        assert "id" in fields and "category" in fields and "measurements.x" in fields


class TestThreatAssessment:
    def test_event_tree_probability_and_level(self):
        tree = EventNode(
            branches=[
                ("bad", 0.1, EventNode(outcome="emergency")),
                ("ok", 0.9, EventNode(outcome="safe")),
            ]
        )
        p, level = assess_threat("event-tree", tree, ScenarioConfig())
        assert p == pytest.approx(0.1) and level == "elevated"

    def test_bayes_probability_and_level(self):
        model = (BayesInput(["h1", "h2"], [0.5, 0.5], [0.8, 0.2]), {"h1"})
        p, level = assess_threat("bayes", model, ScenarioConfig())
        assert p == pytest.approx(0.8) and level == "high"

    def test_threshold_override(self):
        model = (BayesInput(["h1", "h2"], [0.5, 0.5], [0.8, 0.2]), {"h1"})
        config = ScenarioConfig(threat_elevated=0.9, threat_high=0.95)
        _, level = assess_threat("bayes", model, config)
        assert level == "low"


class TestRestorationPlanning:
    def test_blast_furnace_measures_in_paper_order(self, production):
        event = load_event("blast_furnace_event.json")
        plan, warnings = plan_restoration(event, production.store)
        assert not warnings
        assert [m.id for m in plan] == ["m%d" % i for i in range(1, 9)]
        assert plan[0].description == "to pump out water from constructions"
        assert plan[-1].description.startswith("to restore the gas pipeline")
        order = {m.id: i for i, m in enumerate(plan)}
        for measure in plan:
            for prerequisite in measure.prerequisites:
                assert order[prerequisite] < order[measure.id]
        # pump-out precedes the substation start, tuyeres precede the restart
        assert order["m1"] < order["m3"]
        assert order["m6"] < order["m7"]

    def test_no_tags_gives_empty_plan_with_warning(self, production):
        event = load_event("blast_furnace_event.json")
        event.tags = []
        plan, warnings = plan_restoration(event, production.store)
        assert plan == [] and warnings

    def test_cycle_detected(self):
        measures = {
            "a": RestorationMeasure("a", "first", 1, prerequisites=("b",)),
            "b": RestorationMeasure("b", "second", 1, prerequisites=("a",)),
        }
        from ace.scenarios.restoration import _topological

        with pytest.raises(ScenarioError, match="cycle"):
            _topological(measures)

    def test_random_plans_topologically_consistent(self):
        rng = random.Random(5)
        from ace.scenarios.restoration import _topological

        for _ in range(50):
            n = rng.randint(1, 10)
            measures = {}
            ids = ["t%d" % i for i in range(n)]
            for i, mid in enumerate(ids):
                # only earlier ids as prerequisites keeps the graph acyclic
                prereqs = tuple(p for p in ids[:i] if rng.random() < 0.3)
                measures[mid] = RestorationMeasure(mid, mid, rng.randint(0, 5), prereqs)
            ordered = _topological(dict(measures))
            position = {m.id: i for i, m in enumerate(ordered)}
            for m in ordered:
                for p in m.prerequisites:
                    assert position[p] < position[m.id]

    def test_schedule_respects_prerequisites(self, production):
        event = load_event("blast_furnace_event.json")
        plan, _ = plan_restoration(event, production.store)
        schedule = schedule_measures(plan)
        for measure in plan:
            start, end = schedule[measure.id]
            assert end == start + measure.duration_days
            for p in measure.prerequisites:
                assert schedule[p][1] <= start
        downtime = asset_downtime(plan, schedule)
        assert downtime["furnace1"] == schedule["m7"][1]
        assert downtime["furnace3"] == schedule["m8"][1]


class TestExpenseSheets:
    def test_aggregate_total_is_sum_of_sheets(self, production):
        event = load_event("blast_furnace_event.json")
        plan, _ = plan_restoration(event, production.store)
        aggregate = sum_expense_sheets(plan)
        total_minor = sum(m.expenses.total.minor for m in plan)
        assert aggregate.total.minor == total_minor
        assert aggregate.total.text == "505000.00"

    def test_simple_sum(self):
        plan = [
            RestorationMeasure(
                "a", "first", 1,
                expenses=ExpenseSheet([ExpenseItem("x", 1, Money.parse("100.50"))]),
            ),
            RestorationMeasure(
                "b", "second", 1,
                expenses=ExpenseSheet([ExpenseItem("y", 1, Money.parse("49.50"))]),
            ),
        ]
        assert sum_expense_sheets(plan).total.text == "150.00"

    def test_empty_plan_sums_to_zero(self):
        assert sum_expense_sheets([]).total.text == "0.00"

    def test_mixed_currencies_rejected(self):
        plan = [
            RestorationMeasure(
                "a", "first", 1,
                expenses=ExpenseSheet([ExpenseItem("x", 1, Money.parse("1.00", "USD"))], "USD"),
            ),
            RestorationMeasure(
                "b", "second", 1,
                expenses=ExpenseSheet([ExpenseItem("y", 1, Money.parse("1.00", "EUR"))], "EUR"),
            ),
        ]
        with pytest.raises(MoneyError, match="mixed"):
            sum_expense_sheets(plan)

    def test_item_total_exactness(self):
        sheet = ExpenseSheet([ExpenseItem("tuyeres", 24, Money.parse("6500.00"))])
        assert sheet.total.text == "156000.00"


class TestPlanCorrection:
    def test_full_period_downtime_zeroes_period(self):
        revised, prop = correct_plans({"p": [100.0, 100.0, 100.0]}, 10.0, {"p": 10.0})
        assert revised["p"] == [0.0, 100.0, 100.0]
        assert prop is not None and prop.kind == "plan-correction"

    def test_zero_downtime_is_identity(self):
        revised, prop = correct_plans({"p": [100.0, 100.0]}, 10.0, {"p": 0.0})
        assert revised["p"] == [100.0, 100.0] and prop is None

    def test_half_period_pro_rata(self):
        revised, _ = correct_plans({"p": [100.0, 100.0, 100.0]}, 10.0, {"p": 15.0})
        assert revised["p"] == [0.0, 50.0, 100.0]

    def test_never_negative_and_conserves_unaffected(self):
        rng = random.Random(8)
        for _ in range(100):
            volumes = [rng.uniform(0, 100) for _ in range(rng.randint(1, 6))]
            period = rng.uniform(1, 20)
            downtime = rng.uniform(0, period * 8)
            revised, _ = correct_plans({"p": list(volumes)}, period, {"p": downtime})
            for index, (old, new) in enumerate(zip(volumes, revised["p"])):
                assert new >= 0
                if (index + 1) * period <= downtime:
                    assert new == 0.0  # fully covered period
                if index * period >= downtime:
                    assert new == old  # unaffected period conserved exactly


class TestProposition:
    def test_requires_evidence(self):
        with pytest.raises(ScenarioError, match="evidence"):
            Proposition("other", "no backing", [])


class TestConsequenceEdges:
    def test_missing_asset_and_price_itemized_not_fatal(self, production):
        from ace.scenarios import assess_consequences
        from ace.store import FactStore
        from ace.kblang import parse_fact_line

        event = load_event("blast_furnace_event.json")
        event.affected_assets = ["furnace1", "ghost-rig"]
        store = FactStore()
        # registry without prices: the sale change is unquantifiable
        store.assert_fact(parse_fact_line("asset(furnace1, cast_iron, 100, t)."))
        report = assess_consequences(event, [], store)
        assert any("ghost_rig" in note for note in report.unquantified)
        assert any("no price" in note for note in report.unquantified)
        assert report.total.minor == 0

    def test_zero_weights_segment_warns(self, market):
        from ace.scenarios.market import segment_analysis_section
        from ace.store import NumericTable

        store = market.store.copy()
        store.add_table(NumericTable("segment_criteria", ["weight", "score"], [[0.0, 5.0]]))
        fragment, warnings = segment_analysis_section(store)
        assert fragment["score"] == 0.0
        assert warnings

    def test_unchanged_rate_flags_nothing(self, region):
        from ace.scenarios.regional import cost_consequences_fragment

        fragment, warnings = cost_consequences_fragment(
            region.store, "components_imported", 1.0
        )
        assert fragment["unprofitable"] == []
        assert not warnings


class TestProductionScenario:
    def test_blast_furnace_occurred_branch(self, production):
        event = load_event("blast_furnace_event.json")
        report = run_scenario(event, production)
        assert report["branch"] == "occurred"
        assert len(report["measures"]) == 8
        assert report["measures"][0]["description"] == "to pump out water from constructions"
        assert report["expense_total"]["total"]["amount"] == "505000.00"
        causes = {c["version"]: c["status"] for c in report["causes"]}
        assert causes["gas_mixture_explosion"] == "confirmed"
        assert causes["equipment_fatigue"] == "undeterminable"
        descriptions = [p["description"] for p in report["propositions"]]
        assert "change the construction of duster" in descriptions
        consequences = report["consequences"]
        assert consequences["sale_volume_change"]["amount"] == "1980000.00"
        assert consequences["penalties"]["amount"] == "15000.00"
        assert consequences["breached_contracts"] == ["c1"]
        assert consequences["account_payable_increase"]["amount"] == "10500.00"
        assert consequences["total"]["amount"] == "2005500.00"
        assert report["plan_correction"]["revised"]["cast_iron"] == [0.0, 0.0, 500.0]

    def test_threat_branch_for_signal_event(self, production):
        event = load_event("threat_signal_event.json")
        report = run_scenario(event, production)
        assert report["branch"] == "threat"
        assert report["threat"]["probability"] == pytest.approx(0.1)
        assert report["threat"]["level"] == "elevated"
        assert report["preventive"]["proposals"]
        assert "measures" not in report
        assert any(p["kind"] == "other" for p in report["propositions"])

    def test_exactly_one_alternative_proved(self, production):
        for fixture in ("blast_furnace_event.json", "threat_signal_event.json"):
            report = run_scenario(load_event(fixture), production)
            tree = report["goal_tree"]
            assert tree["goal"].startswith("handle_event")
            first_child = tree["children"][0]["goal"]
            if report["branch"] == "threat":
                assert first_child.startswith("signal_event")
            else:
                assert first_child.startswith("occurred_event")

    def test_consequence_total_equals_sum_of_parts(self, production):
        report = run_scenario(load_event("blast_furnace_event.json"), production)
        c = report["consequences"]
        total = (
            Money.parse(c["sale_volume_change"]["amount"])
            + Money.parse(c["penalties"]["amount"])
            + Money.parse(c["account_payable_increase"]["amount"])
        )
        assert c["total"]["amount"] == total.text

    def test_deterministic_reports(self, production):
        event = load_event("blast_furnace_event.json")
        a = json.dumps(run_scenario(event, production), sort_keys=True)
        b = json.dumps(run_scenario(event, production), sort_keys=True)
        assert a == b


class TestMarketScenarios:
    def test_competitive_goods_sections(self, market):
        report = run_scenario(load_event("competitive_goods_event.json"), market)
        section = report["market"]
        assert section["consumer_value"]["best_competitor"] == pytest.approx(8.0, abs=1e-6)
        assert section["consumer_value"]["own"] == pytest.approx(5.0, abs=1e-6)
        assert section["sales_impact"]["predicted_sales"] == pytest.approx(500.0, abs=1e-6)
        assert section["sales_impact"]["change"] == pytest.approx(-300.0, abs=1e-6)
        assert section["plan_info"]["basis"] == "sales_impact"
        assert any(p["kind"] == "new-technology" for p in report["propositions"])

    def test_new_segment_sections(self, market):
        report = run_scenario(load_event("new_segment_event.json"), market)
        section = report["market"]
        assert section["segment_analysis"]["score"] == pytest.approx(7.6)
        assert section["sales_estimate"]["volume"] == pytest.approx(730.0, abs=1e-6)
        assert section["plan_info"]["basis"] == "sales_estimate"

    def test_partner_change_sections(self, market):
        report = run_scenario(load_event("partner_change_event.json"), market)
        section = report["market"]
        zones = {p["partner"]: p["zone"] for p in section["financial_state"]["partners"]}
        assert zones["partner_steel"] == "distress"
        assert zones["partner_logistics"] == "safe"
        assert section["consequences"]["variant"] == "v2"
        assert section["plan_info"]["replan_required"] is True
        assert any(p["kind"] == "other" for p in report["propositions"])


class TestRegionalScenarios:
    def test_fx_change_sections(self, region):
        report = run_scenario(load_event("fx_change_event.json"), region)
        section = report["regional"]
        assert section["forecast"]["horizon"] == 6
        # oracle: continue the recurrence behind the fixture series by hand
        rates = region.store.table("fx_history").column("rate")
        series = list(rates)
        for _ in range(6):
            series.append(1.55 * series[-1] - 0.525 * series[-2])
        assert section["forecast"]["final_rate"] == pytest.approx(series[-1], rel=1e-9)
        flagged = section["cost_consequences"]["unprofitable"]
        assert "widget" in flagged and "gadget" not in flagged
        assert any(p["kind"] == "plan-correction" for p in report["propositions"])

    def test_ecocatastrophe_schema_equals_production(self, production, region):
        production_report = run_scenario(load_event("blast_furnace_event.json"), production)
        eco_report = run_scenario(load_event("ecocatastrophe_event.json"), region)
        assert set(eco_report.keys()) == set(production_report.keys())
        assert eco_report["causes"][0]["version"] == "flood_surge"
        assert eco_report["causes"][0]["status"] == "confirmed"
        assert [m["id"] for m in eco_report["measures"]] == ["em1", "em2"]

    def test_unknown_package_errors(self):
        with pytest.raises(ScenarioError, match="no KB package"):
            load_package("volcano")
