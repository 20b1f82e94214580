import math
import random

import pytest

from ace.decisions import (
    AltmanConfig,
    BayesInput,
    DecisionError,
    DecisionTable,
    EventNode,
    FinancialProfile,
    altman_z,
    bayes_posterior,
    choose,
    choose_optimistic,
    choose_pessimistic,
    choose_pragmatic,
    event_tree_from_relations,
    event_tree_outcomes,
    event_tree_probability,
)


def dt(values, probabilities=None):
    n, m = len(values), len(values[0])
    return DecisionTable(
        ["v%d" % i for i in range(1, n + 1)],
        ["s%d" % j for j in range(1, m + 1)],
        values,
        probabilities,
    )


# independent oracle: enumerate every cell, then scan for the first best row
def oracle_choice(values, kind, probs=None):
    per_variant = []
    for row in values:
        if kind == "pessimistic":
            best = row[0]
            for v in row[1:]:
                if v < best:
                    best = v
        elif kind == "optimistic":
            best = row[0]
            for v in row[1:]:
                if v > best:
                    best = v
        else:
            best = sum(p * v for p, v in zip(probs, row))
        per_variant.append(best)
    winner = max(per_variant)
    candidates = [i for i, v in enumerate(per_variant) if v == winner]
    return min(candidates), winner


class TestChoosers:
    def test_pessimistic_example(self):
        result = choose_pessimistic(dt([[3, 1], [2, 2]]))
        assert (result.index, result.value) == (1, 2)

    def test_pessimistic_single_variant(self):
        result = choose_pessimistic(dt([[4, 7]]))
        assert (result.index, result.value) == (0, 4)

    def test_pessimistic_tie_breaks_low(self):
        assert choose_pessimistic(dt([[1, 1], [1, 1]])).index == 0

    def test_optimistic_example(self):
        result = choose_optimistic(dt([[3, 1], [2, 2]]))
        assert (result.index, result.value) == (0, 3)

    def test_optimistic_single_cell(self):
        result = choose_optimistic(dt([[5]]))
        assert (result.index, result.value) == (0, 5)

    def test_optimistic_all_equal(self):
        assert choose_optimistic(dt([[2, 2], [2, 2]])).index == 0

    def test_pragmatic_tie_example(self):
        result = choose_pragmatic(dt([[3, 1], [2, 2]], [0.5, 0.5]))
        assert (result.index, result.value) == (0, 2.0)

    def test_pragmatic_degenerate_distribution(self):
        result = choose_pragmatic(dt([[3, 1], [2, 2]], [1.0, 0.0]))
        assert (result.index, result.value) == (0, 3.0)

    def test_pragmatic_rejects_bad_distribution(self):
        with pytest.raises(DecisionError, match="0.9"):
            choose_pragmatic(dt([[3, 1], [2, 2]]), [0.3, 0.6])

    def test_pragmatic_needs_probabilities(self):
        with pytest.raises(DecisionError, match="probabilit"):
            choose_pragmatic(dt([[3, 1], [2, 2]]))

    def test_unknown_criterion(self):
        with pytest.raises(DecisionError, match="criterion"):
            choose(dt([[1]]), "hurwicz")

    def test_agreement_with_oracle_on_random_tables(self):
        rng = random.Random(42)
        for _ in range(300):
            n = rng.randint(1, 8)
            m = rng.randint(1, 8)
            # small integer grid makes ties common, exercising tie-breaks
            values = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(n)]
            raw = [rng.random() for _ in range(m)]
            total = sum(raw)
            probs = [r / total for r in raw]
            probs[-1] = 1.0 - sum(probs[:-1])
            t = dt(values, probs)
            for kind, chooser in [
                ("pessimistic", choose_pessimistic),
                ("optimistic", choose_optimistic),
            ]:
                got = chooser(t)
                want_index, want_value = oracle_choice(values, kind)
                assert (got.index, got.value) == (want_index, want_value)
            got = choose_pragmatic(t)
            want_index, want_value = oracle_choice(values, "pragmatic", probs)
            assert got.index == want_index
            assert got.value == pytest.approx(want_value, abs=1e-12)

    def test_row_bounds_and_criterion_order(self):
        rng = random.Random(17)
        for _ in range(200):
            n = rng.randint(1, 8)
            m = rng.randint(1, 8)
            values = [[rng.uniform(-10, 10) for _ in range(m)] for _ in range(n)]
            raw = [rng.random() + 1e-9 for _ in range(m)]
            total = sum(raw)
            probs = [r / total for r in raw]
            probs[-1] = 1.0 - sum(probs[:-1])
            t = dt(values, probs)
            pess, opt, prag = (
                choose_pessimistic(t),
                choose_optimistic(t),
                choose_pragmatic(t),
            )
            for k, row in enumerate(values):
                expected = sum(p * v for p, v in zip(probs, row))
                assert min(row) <= expected + 1e-9
                assert expected <= max(row) + 1e-9
            assert pess.value <= opt.value + 1e-12
            assert pess.value - 1e-9 <= prag.value <= opt.value + 1e-9

    def test_translation_invariance(self):
        rng = random.Random(23)
        for _ in range(100):
            n, m = rng.randint(1, 5), rng.randint(1, 5)
            values = [[rng.uniform(-5, 5) for _ in range(m)] for _ in range(n)]
            shift = rng.uniform(-20, 20)
            shifted = [[v + shift for v in row] for row in values]
            raw = [rng.random() + 0.01 for _ in range(m)]
            total = sum(raw)
            probs = [r / total for r in raw]
            probs[-1] = 1.0 - sum(probs[:-1])
            for chooser in (choose_pessimistic, choose_optimistic):
                a, b = chooser(dt(values)), chooser(dt(shifted))
                assert a.index == b.index
                assert b.value == pytest.approx(a.value + shift, abs=1e-9)
            a = choose_pragmatic(dt(values, probs))
            b = choose_pragmatic(dt(shifted, probs))
            assert a.index == b.index
            assert b.value == pytest.approx(a.value + shift, abs=1e-9)


class TestBayes:
    def test_worked_example(self):
        post = bayes_posterior(BayesInput(["h1", "h2"], [0.5, 0.5], [0.8, 0.2]))
        assert post == pytest.approx([0.8, 0.2])

    def test_identical_likelihoods_keep_prior(self):
        post = bayes_posterior(BayesInput(["a", "b", "c"], [0.2, 0.3, 0.5], [0.4, 0.4, 0.4]))
        assert post == pytest.approx([0.2, 0.3, 0.5])

    def test_impossible_evidence(self):
        with pytest.raises(DecisionError, match="impossible"):
            bayes_posterior(BayesInput(["a", "b"], [0.5, 0.5], [0.0, 0.0]))

    def test_posterior_sums_to_one_and_scale_invariant(self):
        rng = random.Random(31)
        for _ in range(100):
            n = rng.randint(2, 6)
            raw = [rng.random() + 1e-6 for _ in range(n)]
            total = sum(raw)
            priors = [r / total for r in raw]
            priors[-1] = 1.0 - sum(priors[:-1])
            likelihoods = [rng.random() for _ in range(n)]
            likelihoods[0] = max(likelihoods[0], 1e-6)
            post = bayes_posterior(BayesInput(list("abcdef")[:n], priors, likelihoods))
            assert abs(sum(post) - 1.0) <= 1e-12
            scale = rng.uniform(0.1, 1.0)
            scaled = bayes_posterior(
                BayesInput(list("abcdef")[:n], priors, [l * scale for l in likelihoods])
            )
            assert post == pytest.approx(scaled, abs=1e-12)

    def test_bad_prior_sum(self):
        with pytest.raises(DecisionError):
            BayesInput(["a", "b"], [0.5, 0.4], [0.5, 0.5])


class TestEventTree:
    def test_single_level(self):
        tree = EventNode(
            branches=[
                ("fault", 0.1, EventNode(outcome="emergency")),
                ("ok", 0.9, EventNode(outcome="safe")),
            ]
        )
        assert event_tree_probability(tree, "emergency") == pytest.approx(0.1)

    def test_two_level(self):
        inner = EventNode(
            branches=[
                ("ignite", 0.5, EventNode(outcome="emergency")),
                ("vent", 0.5, EventNode(outcome="safe")),
            ]
        )
        tree = EventNode(branches=[("leak", 0.5, inner), ("none", 0.5, EventNode(outcome="safe"))])
        assert event_tree_probability(tree, "emergency") == pytest.approx(0.25)

    def test_invalid_branch_distribution(self):
        with pytest.raises(DecisionError):
            EventNode(
                branches=[
                    ("a", 0.5, EventNode(outcome="x")),
                    ("b", 0.6, EventNode(outcome="y")),
                ]
            )

    def test_outcome_probabilities_sum_to_one(self):
        rng = random.Random(19)
        for _ in range(50):
            tree = _random_tree(rng, depth=3)
            total = sum(event_tree_probability(tree, c) for c in event_tree_outcomes(tree))
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_build_from_relations(self):
        tree = event_tree_from_relations(
            branches=[("root", "leak", 0.5), ("root", "fine", 0.5),
                      ("leak", "boom", 0.5), ("leak", "vent", 0.5)],
            outcomes=[("boom", "emergency"), ("vent", "safe"), ("fine", "safe")],
        )
        assert event_tree_probability(tree, "emergency") == pytest.approx(0.25)

    def test_relations_missing_outcome(self):
        with pytest.raises(DecisionError, match="no outcome"):
            event_tree_from_relations([("root", "a", 1.0)], [])


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return EventNode(outcome=rng.choice(["emergency", "safe", "degraded"]))
    k = rng.randint(2, 3)
    raw = [rng.random() + 0.05 for _ in range(k)]
    total = sum(raw)
    probs = [r / total for r in raw]
    probs[-1] = 1.0 - sum(probs[:-1])
    return EventNode(
        branches=[
            ("b%d" % i, probs[i], _random_tree(rng, depth - 1)) for i in range(k)
        ]
    )


class TestAltman:
    def test_zero_profile_is_distress(self):
        z, zone = altman_z(FinancialProfile(0, 0, 0, 0, 0))
        assert z == 0.0 and zone == "distress"

    def test_sales_only_profile_is_safe(self):
        z, zone = altman_z(FinancialProfile(0, 0, 0, 0, 3))
        assert z == pytest.approx(3.0) and zone == "safe"

    def test_non_finite_ratio_rejected(self):
        with pytest.raises(DecisionError, match="finite"):
            altman_z(FinancialProfile(0, 0, math.nan, 0, 0))

    def test_overridable_configuration(self):
        config = AltmanConfig(coefficients=(1, 1, 1, 1, 1), distress_below=2.0, safe_from=4.0)
        z, zone = altman_z(FinancialProfile(1, 1, 1, 0, 0), config)
        assert z == pytest.approx(3.0) and zone == "grey"
