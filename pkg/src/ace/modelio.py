"""Model files and CSV ingestion.

Model files are JSON with a ``kind`` discriminator, the dimensions and
coefficients, and the fit metadata.  CSV schemas:

* experience tables: header ``class,x1,...,xn``, values in {-1, 0, 1},
  class a positive integer;
* regression samples: header ``y,x1,...,xn``;
* time series: header ``t,y,v1,...,vn`` with integer t ascending;
* decision tables: first row ``,s1,...,sm`` (situation labels), an optional
  ``probabilities`` row, then one row per variant with its label first.
"""

from __future__ import annotations

import csv
import io
import json
import numpy as np

from .classifiers import (
    ExperienceTable,
    FrequenciesModel,
    PlaneModel,
    PotentialModel,
    SurfaceModel,
)
from .decisions import DecisionTable
from .forecast import Discretizer, DynamicalModel, RegressionModel


class ModelIOError(ValueError):
    pass


def model_to_dict(model) -> dict:
    if isinstance(model, PlaneModel):
        return {
            "kind": "plane",
            "coefficients": model.coefficients.tolist(),
            "margin": model.margin,
            "metadata": model.metadata,
        }
    if isinstance(model, SurfaceModel):
        return {
            "kind": "surface",
            "degree": model.degree,
            "powers": [list(p) for p in model.powers],
            "coefficients": model.coefficients.tolist(),
            "dimension": model.dimension,
            "margin": model.margin,
            "metadata": model.metadata,
        }
    if isinstance(model, FrequenciesModel):
        return {
            "kind": "freq",
            "coefficients": model.coefficients.tolist(),
            "frequencies": model.frequencies.tolist(),
            "class_count": model.class_count,
        }
    if isinstance(model, PotentialModel):
        return {
            "kind": "potential",
            "vectors": [list(v) for v in model.vectors],
            "labels": list(model.labels),
            "eps": model.eps,
            "margin": model.margin,
        }
    if isinstance(model, RegressionModel):
        return {
            "kind": "regression",
            "degree": model.degree,
            "intercept": model.intercept,
            "powers": [list(p) for p in model.powers],
            "coefficients": model.coefficients.tolist(),
            "input_ranges": [list(r) for r in model.input_ranges],
            "metadata": model.metadata,
        }
    if isinstance(model, DynamicalModel):
        return {
            "kind": "dynamical",
            "order": model.order,
            "ar_coefficients": model.ar_coefficients.tolist(),
            "exo_coefficients": model.exo_coefficients.tolist(),
            "metadata": model.metadata,
        }
    if isinstance(model, Discretizer):
        return {
            "kind": "discretized",
            "lo": model.lo,
            "hi": model.hi,
            "segments": model.segments,
            "segment_of_class": list(model.segment_of_class),
            "model": None if model.model is None else model_to_dict(model.model),
            "degenerate_value": model.degenerate_value,
        }
    raise ModelIOError("cannot serialize model %r" % type(model).__name__)


def model_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "plane":
        return PlaneModel(
            np.asarray(data["coefficients"]), data["margin"], dict(data.get("metadata", {}))
        )
    if kind == "surface":
        return SurfaceModel(
            data["degree"],
            [tuple(p) for p in data["powers"]],
            np.asarray(data["coefficients"]),
            data["dimension"],
            data["margin"],
            dict(data.get("metadata", {})),
        )
    if kind == "freq":
        return FrequenciesModel(
            np.asarray(data["coefficients"]),
            np.asarray(data["frequencies"]),
            data["class_count"],
        )
    if kind == "potential":
        return PotentialModel(
            [tuple(v) for v in data["vectors"]],
            list(data["labels"]),
            data["eps"],
            data["margin"],
        )
    if kind == "regression":
        return RegressionModel(
            data["degree"],
            data["intercept"],
            [tuple(p) for p in data["powers"]],
            np.asarray(data["coefficients"]),
            [tuple(r) for r in data["input_ranges"]],
            dict(data.get("metadata", {})),
        )
    if kind == "dynamical":
        return DynamicalModel(
            data["order"],
            np.asarray(data["ar_coefficients"]),
            np.asarray(data["exo_coefficients"]),
            dict(data.get("metadata", {})),
        )
    if kind == "discretized":
        inner = data.get("model")
        return Discretizer(
            data["lo"],
            data["hi"],
            data["segments"],
            list(data["segment_of_class"]),
            None if inner is None else model_from_dict(inner),
            data.get("degenerate_value"),
        )
    raise ModelIOError("unknown model kind %r" % kind)


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


# -- CSV ingestion -------------------------------------------------------------


def _rows(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    return [row for row in reader if row and any(cell.strip() for cell in row)]


def parse_experience_csv(text: str) -> ExperienceTable:
    rows = _rows(text)
    if not rows:
        raise ModelIOError("experience CSV is empty")
    header = [c.strip() for c in rows[0]]
    if header[0] != "class":
        raise ModelIOError("experience CSV must start with a 'class' column")
    dimension = len(header) - 1
    table_rows = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != dimension + 1:
            raise ModelIOError(
                "line %d: expected %d cells, got %d" % (line_no, dimension + 1, len(row))
            )
        try:
            label = int(row[0])
            vector = tuple(int(c) for c in row[1:])
        except ValueError as exc:
            raise ModelIOError("line %d: %s" % (line_no, exc)) from None
        table_rows.append((vector, label))
    return ExperienceTable(dimension, table_rows)


def parse_regression_csv(text: str) -> list:
    rows = _rows(text)
    if not rows:
        raise ModelIOError("regression CSV is empty")
    header = [c.strip() for c in rows[0]]
    if header[0] != "y":
        raise ModelIOError("regression CSV must start with a 'y' column")
    samples = []
    for line_no, row in enumerate(rows[1:], start=2):
        try:
            values = [float(c) for c in row]
        except ValueError as exc:
            raise ModelIOError("line %d: %s" % (line_no, exc)) from None
        samples.append((tuple(values[1:]), values[0]))
    return samples


def parse_timeseries_csv(text: str) -> tuple:
    """Returns (y series, list of exogenous series)."""
    rows = _rows(text)
    if not rows:
        raise ModelIOError("time-series CSV is empty")
    header = [c.strip() for c in rows[0]]
    if header[:2] != ["t", "y"]:
        raise ModelIOError("time-series CSV must start with 't,y'")
    n_exo = len(header) - 2
    times = []
    y = []
    exo = [[] for _ in range(n_exo)]
    for line_no, row in enumerate(rows[1:], start=2):
        try:
            values = [float(c) for c in row]
        except ValueError as exc:
            raise ModelIOError("line %d: %s" % (line_no, exc)) from None
        if len(values) != len(header):
            raise ModelIOError(
                "line %d: expected %d cells, got %d" % (line_no, len(header), len(values))
            )
        t = values[0]
        if t != int(t):
            raise ModelIOError("line %d: t must be an integer" % line_no)
        if times and int(t) <= times[-1]:
            raise ModelIOError("line %d: t must be ascending" % line_no)
        times.append(int(t))
        y.append(values[1])
        for i in range(n_exo):
            exo[i].append(values[2 + i])
    return y, exo


def parse_decision_csv(text: str) -> DecisionTable:
    rows = _rows(text)
    if len(rows) < 2:
        raise ModelIOError("decision CSV needs a header and at least one variant row")
    header = rows[0]
    situations = [c.strip() for c in header[1:]]
    probabilities = None
    body = rows[1:]
    if body and body[0][0].strip().lower() in ("probabilities", "p"):
        try:
            probabilities = [float(c) for c in body[0][1:]]
        except ValueError as exc:
            raise ModelIOError("probability row: %s" % exc) from None
        body = body[1:]
    variants = []
    values = []
    for line_no, row in enumerate(body, start=2):
        if len(row) != len(situations) + 1:
            raise ModelIOError(
                "line %d: expected %d cells, got %d" % (line_no, len(situations) + 1, len(row))
            )
        variants.append(row[0].strip())
        try:
            values.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise ModelIOError("line %d: %s" % (line_no, exc)) from None
    return DecisionTable(variants, situations, values, probabilities)


def parse_features_csv(text: str) -> list:
    """Feature rows ``x1,...,xn`` for classify/predict runs."""
    rows = _rows(text)
    if not rows:
        raise ModelIOError("features CSV is empty")
    out = []
    for line_no, row in enumerate(rows[1:], start=2):
        try:
            out.append(tuple(float(c) for c in row))
        except ValueError as exc:
            raise ModelIOError("line %d: %s" % (line_no, exc)) from None
    return out


def read_text(path) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()
