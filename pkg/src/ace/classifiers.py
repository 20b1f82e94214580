"""Pattern-recognition classifiers over ternary logic vectors.

State characteristics are encoded as logic vectors with components in
{-1, 0, +1} meaning present / absent / unknown.  Four methods assign a state
to a class: a least-squares separating plane, a polynomial separating
surface, per-class log-odds scoring (frequencies method), and inverse
squared-distance potential sums over the experience table.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np


class ClassifierError(ValueError):
    pass


TRI_STATE = {"present": 1, "absent": -1, "unknown": 0}


def encode_logic_vector(answers: Sequence[str]) -> tuple:
    """Map present/absent/unknown answers to a (+1, -1, 0) logic vector."""
    if not answers:
        raise ClassifierError("at least one characteristic is required")
    try:
        return tuple(TRI_STATE[a] for a in answers)
    except KeyError as exc:
        raise ClassifierError("unknown tri-state answer %r" % exc.args[0]) from None


def as_logic_vector(values: Sequence[float]) -> tuple:
    vec = tuple(int(v) for v in values)
    if not vec:
        raise ClassifierError("logic vector must be non-empty")
    for v in vec:
        if v not in (-1, 0, 1):
            raise ClassifierError("logic vector components must be -1, 0 or +1, got %r" % v)
    return vec


@dataclass
class ExperienceTable:
    """Labeled training rows: logic vectors with class labels 1..m."""

    dimension: int
    rows: list  # list of (logic vector, class label)

    def __post_init__(self):
        if self.dimension < 1:
            raise ClassifierError("dimension must be >= 1")
        if not self.rows:
            raise ClassifierError("experience table has no rows")
        labels = set()
        checked = []
        for vec, label in self.rows:
            vec = as_logic_vector(vec)
            if len(vec) != self.dimension:
                raise ClassifierError(
                    "row has dimension %d, table has %d" % (len(vec), self.dimension)
                )
            if not isinstance(label, int) or label < 1:
                raise ClassifierError("class label must be a positive integer, got %r" % label)
            labels.add(label)
            checked.append((vec, label))
        self.rows = checked
        m = max(labels)
        missing = set(range(1, m + 1)) - labels
        if missing:
            raise ClassifierError("no rows for class %d" % min(missing))
        self.class_count = m

    @classmethod
    def from_arrays(cls, vectors, labels):
        vectors = list(vectors)
        if not vectors:
            raise ClassifierError("experience table has no rows")
        return cls(len(vectors[0]), list(zip(vectors, [int(l) for l in labels])))


def solve_least_squares(X: np.ndarray, y: np.ndarray, ridge: float = 1e-8):
    """Normal equations with a ridge fallback on singular systems.

    Returns (coefficients, fallback_fired)."""
    XtX = X.T @ X
    Xty = X.T @ y
    k = XtX.shape[0]
    if np.linalg.matrix_rank(XtX) < k:
        return np.linalg.solve(XtX + ridge * np.eye(k), Xty), True
    return np.linalg.solve(XtX, Xty), False


def monomial_powers(n_vars: int, degree: int) -> list:
    """Exponent tuples of total degree <= degree, by degree then lexicographic.

    The degree-0 monomial comes first, so degree 1 yields [1, x1, ..., xn]."""
    powers = [e for e in product(range(degree + 1), repeat=n_vars) if sum(e) <= degree]
    powers.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return powers


def expand_monomials(X: np.ndarray, powers: list) -> np.ndarray:
    out = np.empty((X.shape[0], len(powers)))
    for j, exps in enumerate(powers):
        col = np.ones(X.shape[0])
        for i, e in enumerate(exps):
            if e:
                col = col * X[:, i] ** e
        out[:, j] = col
    return out


@dataclass(frozen=True)
class ClassDecision:
    """Outcome of a classification; None means inside the undecided margin."""

    outcome: Optional[int]
    score: Optional[float] = None
    scores: Optional[tuple] = None

    @property
    def undecided(self) -> bool:
        return self.outcome is None


@dataclass
class PlaneModel:
    coefficients: np.ndarray  # a_0..a_n
    margin: float = 1e-6
    metadata: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.coefficients) - 1

    def score(self, x: Sequence[float]) -> float:
        if len(x) != self.dimension:
            raise ClassifierError(
                "input has dimension %d, model expects %d" % (len(x), self.dimension)
            )
        return float(self.coefficients[0] + np.dot(self.coefficients[1:], x))


@dataclass
class SurfaceModel:
    degree: int
    powers: list
    coefficients: np.ndarray
    dimension: int
    margin: float = 1e-6
    metadata: dict = field(default_factory=dict)

    def score(self, x: Sequence[float]) -> float:
        if len(x) != self.dimension:
            raise ClassifierError(
                "input has dimension %d, model expects %d" % (len(x), self.dimension)
            )
        row = expand_monomials(np.asarray([x], dtype=float), self.powers)[0]
        return float(np.dot(row, self.coefficients))


def _two_class_targets(table: ExperienceTable) -> np.ndarray:
    if table.class_count != 2:
        raise ClassifierError("two classes required, table has %d" % table.class_count)
    return np.asarray([1.0 if label == 1 else -1.0 for _, label in table.rows])


def fit_separating_plane(table: ExperienceTable, margin: float = 1e-6) -> PlaneModel:
    """Least-squares linear decision function for a two-class table."""
    y = _two_class_targets(table)
    X = np.column_stack(
        [np.ones(len(table.rows)), np.asarray([v for v, _ in table.rows], dtype=float)]
    )
    coeffs, fallback = solve_least_squares(X, y)
    residual = float(np.sum((X @ coeffs - y) ** 2))
    return PlaneModel(coeffs, margin, {"ridge_fallback": fallback, "residual": residual})


def fit_separating_surface(
    table: ExperienceTable, degree: int, margin: float = 1e-6
) -> SurfaceModel:
    """Least-squares polynomial decision function of the given total degree."""
    if degree < 1:
        raise ClassifierError("degree >= 1 required")
    y = _two_class_targets(table)
    powers = monomial_powers(table.dimension, degree)
    if len(powers) > len(table.rows):
        warnings.warn(
            "surface has %d monomials but only %d rows; fit is underdetermined"
            % (len(powers), len(table.rows)),
            stacklevel=2,
        )
    X = expand_monomials(np.asarray([v for v, _ in table.rows], dtype=float), powers)
    coeffs, fallback = solve_least_squares(X, y)
    residual = float(np.sum((X @ coeffs - y) ** 2))
    return SurfaceModel(
        degree,
        powers,
        coeffs,
        table.dimension,
        margin,
        {
            "ridge_fallback": fallback,
            "residual": residual,
            "underdetermined": len(powers) > len(table.rows),
        },
    )


def classify_geometric(model, x: Sequence[float]) -> ClassDecision:
    """Class 1 above the margin, class 2 below, undecided inside it."""
    score = model.score(as_logic_vector(x))
    if score > model.margin:
        return ClassDecision(1, score)
    if score < -model.margin:
        return ClassDecision(2, score)
    return ClassDecision(None, score)


@dataclass
class FrequenciesModel:
    """Per-class log-odds coefficients ln(p / (1 - p))."""

    coefficients: np.ndarray  # shape (m, n)
    frequencies: np.ndarray  # shape (m, n), smoothed
    class_count: int

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[1]


def fit_frequencies(table: ExperienceTable) -> FrequenciesModel:
    """Appearance frequency of each characteristic per class, Laplace smoothed.

    Appearance means the component is +1; both -1 and 0 count against.  The
    smoothing p = (k + 1) / (N + 2) keeps the log-odds finite at k = 0 and
    k = N.
    """
    m, n = table.class_count, table.dimension
    freqs = np.empty((m, n))
    for j in range(1, m + 1):
        rows = [v for v, label in table.rows if label == j]
        count = len(rows)
        arr = np.asarray(rows)
        appearances = (arr == 1).sum(axis=0)
        freqs[j - 1] = (appearances + 1) / (count + 2)
    coeffs = np.log(freqs / (1.0 - freqs))
    return FrequenciesModel(coeffs, freqs, m)


def classify_frequencies(model: FrequenciesModel, x: Sequence[float]) -> int:
    """Class with maximal score; ties go to the lowest class index."""
    x = as_logic_vector(x)
    if len(x) != model.dimension:
        raise ClassifierError(
            "input has dimension %d, model expects %d" % (len(x), model.dimension)
        )
    scores = model.coefficients @ np.asarray(x, dtype=float)
    return int(np.argmax(scores)) + 1


def frequencies_scores(model: FrequenciesModel, x: Sequence[float]) -> tuple:
    x = as_logic_vector(x)
    return tuple(float(s) for s in model.coefficients @ np.asarray(x, dtype=float))


def potential_value(x: Sequence[float], a: Sequence[float], eps: float) -> float:
    """Inverse squared distance, floored at 1/eps near zero distance."""
    if eps <= 0:
        raise ClassifierError("eps must be positive")
    if len(x) != len(a):
        raise ClassifierError("vectors have different dimensions")
    rho2 = sum((float(xi) - float(ai)) ** 2 for xi, ai in zip(x, a))
    if rho2 >= eps:
        return 1.0 / rho2
    return 1.0 / eps


@dataclass
class PotentialModel:
    """Training rows kept verbatim; scoring sums signed potentials.

    Two-class tables score with +1 weights for class 1 and -1 for class 2;
    tables with more classes score one-vs-rest per class.
    """

    vectors: list
    labels: list  # class labels 1..m
    eps: float = 1e-3
    margin: float = 1e-6

    def __post_init__(self):
        if not self.vectors:
            raise ClassifierError("potential model needs at least one training row")
        if self.eps <= 0:
            raise ClassifierError("eps must be positive")
        self.vectors = [as_logic_vector(v) for v in self.vectors]
        if len({len(v) for v in self.vectors}) != 1:
            raise ClassifierError("training vectors have mixed dimensions")
        if len(self.labels) != len(self.vectors):
            raise ClassifierError("labels and vectors differ in length")
        self.labels = [int(l) for l in self.labels]
        if any(l < 1 for l in self.labels):
            raise ClassifierError("class labels must be positive integers")
        self.class_count = max(self.labels)

    @classmethod
    def from_table(cls, table: ExperienceTable, eps: float = 1e-3, margin: float = 1e-6):
        return cls([v for v, _ in table.rows], [l for _, l in table.rows], eps, margin)

    @property
    def dimension(self) -> int:
        return len(self.vectors[0])

    def class_score(self, x: Sequence[float], class_index: int) -> float:
        """One-vs-rest potential sum: +1 for the class, -1 for the rest."""
        total = 0.0
        for vec, label in zip(self.vectors, self.labels):
            gamma = 1.0 if label == class_index else -1.0
            total += gamma * potential_value(x, vec, self.eps)
        return total


def classify_potential(model: PotentialModel, x: Sequence[float]) -> ClassDecision:
    x = as_logic_vector(x)
    if len(x) != model.dimension:
        raise ClassifierError(
            "input has dimension %d, model expects %d" % (len(x), model.dimension)
        )
    if model.class_count == 2:
        score = model.class_score(x, 1)
        if score > model.margin:
            return ClassDecision(1, score)
        if score < -model.margin:
            return ClassDecision(2, score)
        return ClassDecision(None, score)
    scores = tuple(model.class_score(x, j) for j in range(1, model.class_count + 1))
    best = max(range(len(scores)), key=lambda i: (scores[i], -i))
    return ClassDecision(best + 1, scores=scores)
