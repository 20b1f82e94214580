import math
import random

import numpy as np
import pytest

from ace.classifiers import (
    ClassifierError,
    ExperienceTable,
    FrequenciesModel,
    PotentialModel,
    classify_frequencies,
    classify_geometric,
    classify_potential,
    encode_logic_vector,
    fit_frequencies,
    fit_separating_plane,
    fit_separating_surface,
    frequencies_scores,
    potential_value,
)


def table(rows):
    return ExperienceTable(len(rows[0][0]), rows)


TWO_POINT = table([((1,), 1), ((-1,), 2)])


class TestEncoding:
    def test_tri_state_mapping(self):
        assert encode_logic_vector(["present", "absent", "unknown"]) == (1, -1, 0)

    def test_empty_rejected(self):
        with pytest.raises(ClassifierError):
            encode_logic_vector([])

    def test_single(self):
        assert encode_logic_vector(["present"]) == (1,)


class TestPlane:
    def test_two_symmetric_points_interpolated(self):
        model = fit_separating_plane(TWO_POINT)
        assert model.coefficients == pytest.approx([0.0, 1.0], abs=1e-12)
        assert model.metadata["residual"] == pytest.approx(0.0, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(ClassifierError, match="two classes"):
            fit_separating_plane(table([((1, 1), 1), ((1, -1), 1)]))

    def test_local_optimality_on_random_rows(self):
        rng = random.Random(7)
        rows = []
        for _ in range(20):
            vec = tuple(rng.choice((-1, 0, 1)) for _ in range(4))
            label = 1 if sum(vec) >= 0 else 2
            rows.append((vec, label))
        rows[0] = (rows[0][0], 1)
        rows[1] = (rows[1][0], 2)
        t = table(rows)
        model = fit_separating_plane(t)
        X = np.column_stack([np.ones(len(rows)), [r[0] for r in rows]])
        y = np.array([1.0 if label == 1 else -1.0 for _, label in rows])

        def residual(coeffs):
            return float(np.sum((X @ coeffs - y) ** 2))

        base = residual(model.coefficients)
        for i in range(len(model.coefficients)):
            for delta in (1e-3, -1e-3):
                perturbed = model.coefficients.copy()
                perturbed[i] += delta
                assert base <= residual(perturbed) + 1e-12

    def test_residual_beats_1000_random_vectors(self):
        rng = np.random.default_rng(3)
        rows = [
            (tuple(rng.choice((-1, 0, 1)) for _ in range(3)), rng.integers(1, 3))
            for _ in range(30)
        ]
        rows[0] = (rows[0][0], 1)
        rows[1] = (rows[1][0], 2)
        t = table([(v, int(l)) for v, l in rows])
        model = fit_separating_plane(t)
        X = np.column_stack([np.ones(len(t.rows)), [r[0] for r in t.rows]])
        y = np.array([1.0 if label == 1 else -1.0 for _, label in t.rows])
        base = float(np.sum((X @ model.coefficients - y) ** 2))
        for _ in range(1000):
            candidate = rng.uniform(-2, 2, size=len(model.coefficients))
            assert base <= float(np.sum((X @ candidate - y) ** 2)) + 1e-12


class TestSurface:
    def test_degree_one_reduces_to_plane(self):
        plane = fit_separating_plane(TWO_POINT)
        surface = fit_separating_surface(TWO_POINT, degree=1)
        assert np.allclose(surface.coefficients, plane.coefficients, atol=1e-10)

    def test_xor_table_separated_at_degree_two(self):
        xor = table(
            [((1, -1), 1), ((-1, 1), 1), ((1, 1), 2), ((-1, -1), 2)]
        )
        with pytest.warns(UserWarning):  # 6 monomials over 4 rows
            model = fit_separating_surface(xor, degree=2, margin=1e-6)
        for vec, label in xor.rows:
            assert classify_geometric(model, vec).outcome == label

    def test_degree_zero_rejected(self):
        with pytest.raises(ClassifierError, match="degree"):
            fit_separating_surface(TWO_POINT, degree=0)

    def test_underdetermined_warns(self):
        with pytest.warns(UserWarning, match="underdetermined"):
            fit_separating_surface(TWO_POINT, degree=3)


class TestGeometricClassification:
    def test_positive_score_is_class_one(self):
        model = fit_separating_plane(TWO_POINT, margin=0.01)
        decision = classify_geometric(model, (1,))
        assert decision.outcome == 1 and decision.score == pytest.approx(1.0)

    def test_zero_score_is_undecided(self):
        model = fit_separating_plane(TWO_POINT, margin=0.01)
        decision = classify_geometric(model, (0,))
        assert decision.undecided and decision.score == pytest.approx(0.0)

    def test_dimension_mismatch(self):
        model = fit_separating_plane(TWO_POINT)
        with pytest.raises(ClassifierError, match="dimension"):
            classify_geometric(model, (1, 1))


class TestFrequencies:
    def test_half_appearance_gives_zero_coefficient(self):
        t = table(
            [((1,), 1), ((1,), 1), ((-1,), 1), ((0,), 1), ((-1,), 2)]
        )
        model = fit_frequencies(t)
        # class 1: 2 of 4 rows have +1; smoothed (2+1)/(4+2) = 0.5
        assert model.frequencies[0][0] == pytest.approx(0.5)
        assert model.coefficients[0][0] == pytest.approx(0.0)

    def test_all_appearances_smoothed(self):
        t = table([((1,), 1)] * 4 + [((-1,), 2)])
        model = fit_frequencies(t)
        assert model.frequencies[0][0] == pytest.approx(5 / 6)
        assert model.coefficients[0][0] == pytest.approx(math.log(5.0))

    def test_missing_class_rejected(self):
        with pytest.raises(ClassifierError, match="class 2"):
            table([((1,), 1), ((-1,), 3)])

    def test_classify_picks_max_score(self):
        model = FrequenciesModel(
            np.array([[1.0, 0.0], [0.0, 1.0]]), np.full((2, 2), 0.5), 2
        )
        # scores: class1 = 1, class2 = -1
        assert classify_frequencies(model, (1, -1)) == 1

    def test_tie_breaks_to_lowest_class(self):
        model = FrequenciesModel(
            np.array([[1.0, 0.0], [1.0, 0.0]]), np.full((2, 2), 0.5), 2
        )
        assert classify_frequencies(model, (1, 1)) == 1

    def test_dimension_mismatch(self):
        model = fit_frequencies(table([((1, 1), 1), ((-1, -1), 2)]))
        with pytest.raises(ClassifierError):
            classify_frequencies(model, (1,))

    def test_monotone_frequency_monotone_coefficient(self):
        # ln(p/(1-p)) strictly increasing in p
        ps = [0.1, 0.25, 0.5, 0.75, 0.9]
        coeffs = [math.log(p / (1 - p)) for p in ps]
        assert coeffs == sorted(coeffs)

    def test_argmax_invariant_under_constant_shift(self):
        t = table([((1, 0, -1), 1), ((0, 1, 1), 2), ((-1, -1, 0), 3)])
        model = fit_frequencies(t)
        for x in [(1, 0, -1), (0, 1, 1), (1, 1, 1)]:
            scores = frequencies_scores(model, x)
            shifted = [s + 17.5 for s in scores]
            assert scores.index(max(scores)) == shifted.index(max(shifted))
            assert classify_frequencies(model, x) == scores.index(max(scores)) + 1

    def test_classification_commutes_with_class_permutation(self):
        rng = random.Random(11)
        rows = [
            (tuple(rng.choice((-1, 0, 1)) for _ in range(4)), rng.randint(1, 3))
            for _ in range(24)
        ]
        for c in (1, 2, 3):
            rows.append((tuple(rng.choice((-1, 1)) for _ in range(4)), c))
        perm = {1: 3, 2: 1, 3: 2}
        base = fit_frequencies(table(rows))
        permuted = fit_frequencies(table([(v, perm[l]) for v, l in rows]))
        for _ in range(20):
            x = tuple(rng.choice((-1, 0, 1)) for _ in range(4))
            scores = frequencies_scores(base, x)
            if sorted(scores)[-1] == sorted(scores)[-2]:
                continue  # tie-break order is not permutation invariant
            assert perm[classify_frequencies(base, x)] == classify_frequencies(permuted, x)


class TestPotential:
    def test_self_potential_hits_floor(self):
        assert potential_value((1, -1), (1, -1), 0.001) == pytest.approx(1000.0)

    def test_inverse_squared_distance(self):
        assert potential_value((1, -1), (1, 1), 0.001) == pytest.approx(0.25)

    def test_eps_must_be_positive(self):
        with pytest.raises(ClassifierError):
            potential_value((1,), (1,), 0.0)

    def test_symmetry_and_bound(self):
        rng = random.Random(5)
        for _ in range(50):
            x = tuple(rng.choice((-1, 0, 1)) for _ in range(6))
            a = tuple(rng.choice((-1, 0, 1)) for _ in range(6))
            eps = 10 ** rng.uniform(-4, -1)
            assert potential_value(x, a, eps) == potential_value(a, x, eps)
            assert potential_value(x, a, eps) <= 1.0 / eps + 1e-9

    def test_two_class_worked_example(self):
        model = PotentialModel([(1,), (-1,)], [1, 2], eps=0.01, margin=0.01)
        decision = classify_potential(model, (1,))
        assert decision.outcome == 1
        assert decision.score == pytest.approx(99.75)
        decision = classify_potential(model, (-1,))
        assert decision.outcome == 2
        assert decision.score == pytest.approx(-99.75)

    def test_empty_model_rejected(self):
        with pytest.raises(ClassifierError):
            PotentialModel([], [], eps=0.01)

    def test_training_set_consistency_random_tables(self):
        rng = random.Random(13)
        for _ in range(5):
            vectors = set()
            while len(vectors) < 50:
                vectors.add(tuple(rng.choice((-1, 0, 1)) for _ in range(8)))
            vectors = sorted(vectors)
            labels = [rng.randint(1, 2) for _ in vectors]
            labels[0], labels[1] = 1, 2
            model = PotentialModel(vectors, labels, eps=1e-3)
            for vec, label in zip(vectors, labels):
                assert classify_potential(model, vec).outcome == label

    def test_multiclass_one_vs_rest(self):
        vectors = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        labels = [1, 2, 3, 3]
        model = PotentialModel(vectors, labels, eps=1e-3)
        for vec, label in zip(vectors, labels):
            assert classify_potential(model, vec).outcome == label

    def test_dimension_mismatch(self):
        model = PotentialModel([(1, 1)], [1], eps=0.01)
        with pytest.raises(ClassifierError):
            classify_potential(model, (1,))
