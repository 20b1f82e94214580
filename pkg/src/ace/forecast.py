"""Factor prediction: regression, discrete-time dynamics, discretized lookup.

Three fitting paths, all least squares: polynomial regression of a factor on
measured characteristics, a linear recurrence with autoregressive and
exogenous terms for multi-step behaviour, and a segment discretizer that
turns prediction into classification with the potential method when the
response cannot be fit by a polynomial.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classifiers import (
    PotentialModel,
    as_logic_vector,
    classify_potential,
    expand_monomials,
    monomial_powers,
    solve_least_squares,
)


class PredictionError(ValueError):
    pass


@dataclass
class FitDiagnostics:
    residual_variance: float
    r_squared: float
    sample_count: int
    input_correlations: list
    coefficient_count: int = 0

    @property
    def underdetermined(self) -> bool:
        return self.sample_count < self.coefficient_count


def _diagnostics(X, y, coeffs, n_inputs, raw_inputs) -> FitDiagnostics:
    residuals = y - X @ coeffs
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-12 else 0.0
    r2 = min(max(r2, 0.0), 1.0)
    correlations = []
    for i in range(n_inputs):
        col = raw_inputs[:, i]
        if np.std(col) == 0 or np.std(y) == 0:
            correlations.append(0.0)
        else:
            correlations.append(float(np.corrcoef(col, y)[0, 1]))
    return FitDiagnostics(
        residual_variance=ss_res / len(y),
        r_squared=r2,
        sample_count=len(y),
        input_correlations=correlations,
        coefficient_count=len(coeffs),
    )


@dataclass
class RegressionModel:
    degree: int
    intercept: bool
    powers: list  # monomial exponents, aligned with coefficients
    coefficients: np.ndarray
    input_ranges: list  # per-input (lo, hi) seen in training
    metadata: dict = field(default_factory=dict)

    @property
    def n_inputs(self) -> int:
        return len(self.input_ranges)


def _regression_design(inputs: np.ndarray, degree: int, intercept: bool):
    n = inputs.shape[1]
    powers = monomial_powers(n, degree)
    if not intercept:
        powers = [p for p in powers if sum(p) > 0]
    return expand_monomials(inputs, powers), powers


def fit_regression(
    samples: Sequence, degree: int = 1, intercept: bool = True
) -> tuple:
    """Least-squares polynomial fit of y on the inputs.

    ``samples`` is a sequence of (inputs, y).  The printed linear form has no
    intercept; the flag defaults on because enterprise factors are rarely
    origin-centered, and switching it off restores the bare form.
    """
    if not samples:
        raise PredictionError("no samples")
    if degree < 1:
        raise PredictionError("degree >= 1 required")
    first_dim = len(samples[0][0])
    for inputs, _ in samples:
        if len(inputs) != first_dim:
            raise PredictionError("inconsistent input dimension")
    X_raw = np.asarray([list(map(float, s[0])) for s in samples])
    y = np.asarray([float(s[1]) for s in samples])
    X, powers = _regression_design(X_raw, degree, intercept)
    if X.shape[0] < X.shape[1]:
        warnings.warn(
            "%d samples for %d coefficients; fit is underdetermined" % X.shape,
            stacklevel=2,
        )
    coeffs, fallback = solve_least_squares(X, y)
    ranges = [(float(X_raw[:, i].min()), float(X_raw[:, i].max())) for i in range(first_dim)]
    model = RegressionModel(
        degree, intercept, powers, coeffs, ranges, {"ridge_fallback": fallback}
    )
    return model, _diagnostics(X, y, coeffs, first_dim, X_raw)


def predict_regression(model: RegressionModel, inputs: Sequence[float]) -> tuple:
    """Evaluate the fitted form; flags inputs outside the training ranges.

    The linear form holds only for small changes of the characteristics, so
    extrapolation is reported rather than silently returned."""
    if len(inputs) != model.n_inputs:
        raise PredictionError(
            "input has dimension %d, model expects %d" % (len(inputs), model.n_inputs)
        )
    row = expand_monomials(np.asarray([list(map(float, inputs))]), model.powers)[0]
    y_hat = float(np.dot(row, model.coefficients))
    extrapolating = any(
        not (lo <= float(v) <= hi) for v, (lo, hi) in zip(inputs, model.input_ranges)
    )
    return y_hat, extrapolating


@dataclass
class DynamicalModel:
    """Linear recurrence: next value from lagged values and exogenous inputs."""

    order: int  # m; lags y(t) .. y(t-m)
    ar_coefficients: np.ndarray  # a_0 .. a_m
    exo_coefficients: np.ndarray  # b_1 .. b_n
    metadata: dict = field(default_factory=dict)

    @property
    def n_exogenous(self) -> int:
        return len(self.exo_coefficients)

    def step(self, lags: Sequence[float], exogenous: Sequence[float] = ()) -> float:
        """One application of the recurrence; lags are [y(t), ..., y(t-m)]."""
        row = np.concatenate([np.asarray(lags, dtype=float), np.asarray(exogenous, dtype=float)])
        coeffs = np.concatenate([self.ar_coefficients, self.exo_coefficients])
        return float(np.dot(row, coeffs))


def fit_dynamical(
    history: Sequence[float], exogenous: Sequence[Sequence[float]] = (), order: int = 0
) -> tuple:
    """Least squares over every valid step of the recurrence.

    ``exogenous`` holds one series per input, each aligned with ``history``."""
    if order < 0:
        raise PredictionError("order must be >= 0")
    y = np.asarray([float(v) for v in history])
    if len(y) < order + 2:
        raise PredictionError(
            "insufficient history: need at least %d points for order %d, got %d"
            % (order + 2, order, len(y))
        )
    exo = [np.asarray([float(v) for v in series]) for series in exogenous]
    for series in exo:
        if len(series) != len(y):
            raise PredictionError(
                "exogenous series of length %d is misaligned with history of length %d"
                % (len(series), len(y))
            )
    rows = []
    targets = []
    for t in range(order, len(y) - 1):
        lags = [y[t - i] for i in range(order + 1)]
        inputs = [series[t] for series in exo]
        rows.append(lags + inputs)
        targets.append(y[t + 1])
    X = np.asarray(rows)
    targets = np.asarray(targets)
    if X.shape[0] < X.shape[1]:
        warnings.warn(
            "%d usable steps for %d coefficients; fit is underdetermined" % X.shape,
            stacklevel=2,
        )
    coeffs, fallback = solve_least_squares(X, targets)
    model = DynamicalModel(
        order,
        coeffs[: order + 1],
        coeffs[order + 1:],
        {"ridge_fallback": fallback},
    )
    raw = X[:, order + 1:] if exo else np.empty((len(targets), 0))
    diag = _diagnostics(X, targets, coeffs, raw.shape[1], raw)
    return model, diag


def simulate_dynamical(
    model: DynamicalModel,
    seed_history: Sequence[float],
    horizon: int,
    exogenous_future: Optional[Sequence[Sequence[float]]] = None,
    hold_last_values: Optional[Sequence[float]] = None,
) -> list:
    """Iterate the recurrence ``horizon`` steps, feeding predictions back.

    Future exogenous values must be supplied per step, or a hold-last vector
    selected explicitly; there is no silent default."""
    m = model.order
    seed = [float(v) for v in seed_history]
    if len(seed) < m + 1:
        raise PredictionError(
            "seed history needs at least %d values for order %d" % (m + 1, m)
        )
    n = model.n_exogenous
    if n > 0:
        if exogenous_future is None and hold_last_values is None:
            raise PredictionError(
                "model has exogenous inputs: supply exogenous_future or hold_last_values"
            )
        if exogenous_future is not None and len(exogenous_future) < horizon:
            raise PredictionError(
                "exogenous scenario covers %d steps, horizon is %d"
                % (len(exogenous_future), horizon)
            )
    values = list(seed)
    out = []
    for step in range(horizon):
        if n > 0:
            if exogenous_future is not None:
                v = [float(x) for x in exogenous_future[step]]
            else:
                v = [float(x) for x in hold_last_values]
            if len(v) != n:
                raise PredictionError(
                    "exogenous step has %d values, model expects %d" % (len(v), n)
                )
        else:
            v = []
        lags = [values[-1 - i] for i in range(m + 1)]
        y_next = model.step(lags, v)
        out.append(y_next)
        values.append(y_next)
    return out


@dataclass
class Discretizer:
    """Equal-width segmentation of the response driving a potential classifier.

    Occupied segments become classes; predictions return the midpoint of the
    segment the classifier picks, bounding training error by half a segment
    width while the classifier stays training-consistent."""

    lo: float
    hi: float
    segments: int
    segment_of_class: list  # class index (1-based) -> segment index (0-based)
    model: Optional[PotentialModel]
    degenerate_value: Optional[float] = None

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.segments

    def segment_midpoint(self, segment: int) -> float:
        return self.lo + (segment + 0.5) * self.width

    def segment_of(self, y: float) -> int:
        """Boundary values belong to the higher segment; max y to the last."""
        if self.hi == self.lo:
            return 0
        idx = int((y - self.lo) / self.width)
        return min(max(idx, 0), self.segments - 1)


def fit_discretized(
    samples: Sequence, segments: int = 100, eps: float = 1e-3
) -> Discretizer:
    """Divide the response range into equal segments and classify into them."""
    if segments < 2:
        raise PredictionError("segments must be >= 2")
    if not samples:
        raise PredictionError("no samples")
    vectors = [as_logic_vector(v) for v, _ in samples]
    ys = [float(y) for _, y in samples]
    lo, hi = min(ys), max(ys)
    if lo == hi:
        warnings.warn("constant response %r: degenerate single-segment model" % lo, stacklevel=2)
        return Discretizer(lo, hi, 1, [0], None, degenerate_value=lo)
    disc = Discretizer(lo, hi, segments, [], None)
    seg_indices = [disc.segment_of(y) for y in ys]
    occupied = sorted(set(seg_indices))
    class_of_segment = {seg: i + 1 for i, seg in enumerate(occupied)}
    labels = [class_of_segment[s] for s in seg_indices]
    disc.segment_of_class = occupied
    disc.model = PotentialModel(vectors, labels, eps=eps)
    return disc


def predict_discretized(disc: Discretizer, inputs: Sequence[float]) -> tuple:
    """Classify the inputs to a segment; the midpoint is the point prediction.

    Returns (midpoint, segment index)."""
    if disc.degenerate_value is not None:
        return disc.degenerate_value, 0
    x = as_logic_vector(inputs)
    if len(x) != disc.model.dimension:
        raise PredictionError(
            "input has dimension %d, model expects %d" % (len(x), disc.model.dimension)
        )
    decision = classify_potential(disc.model, x)
    class_index = decision.outcome if decision.outcome is not None else 1
    segment = disc.segment_of_class[class_index - 1]
    return disc.segment_midpoint(segment), segment
