"""Command line: run scenarios headless, serve the HTTP API, fit and apply

models.  ``ace run`` writes the report JSON plus optional trace, CSV
summaries and figures; identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .classifiers import (
    PotentialModel,
    classify_frequencies,
    classify_geometric,
    classify_potential,
    fit_frequencies,
    fit_separating_plane,
    fit_separating_surface,
)
from .forecast import fit_dynamical, fit_regression
from .kblang import KBSyntaxError, load_kb
from .modelio import (
    ModelIOError,
    load_model,
    parse_experience_csv,
    parse_features_csv,
    parse_regression_csv,
    parse_timeseries_csv,
    read_text,
    save_model,
)
from .scenarios import ScenarioConfig, ScenarioPackage, load_package
from .sessions import EXIT_ERROR, run_headless
from .store import StoreError, load_store, FactStore
from .terms import KnowledgeBase


@click.group()
def main():
    """Adaptive enterprise-control engine."""


def _load_kb_paths(paths) -> ScenarioPackage:
    kb = KnowledgeBase()
    store = FactStore()
    for path in paths:
        path = Path(path)
        if path.suffix == ".facts":
            store.merge(load_store(path))
        else:
            file_kb, file_store = load_kb(path)
            kb.extend(file_kb)
            store.merge(file_store)
    return ScenarioPackage("adhoc", kb, store)


@main.command()
@click.option("--kb", "kb_paths", multiple=True, type=click.Path(exists=True),
              help="Knowledge-base (.kb) and fact (.facts) files; may repeat.")
@click.option("--package", "package_name", default=None,
              help="Built-in package name (used when no --kb is given; "
                   "defaults to the event category).")
@click.option("--event", "event_path", required=True, type=click.Path(exists=True))
@click.option("--answers", "answers_path", type=click.Path(exists=True),
              help="Scripted answers, one per line, in encounter order.")
@click.option("--report", "report_path", type=click.Path(), help="Report JSON output path.")
@click.option("--trace", "trace_path", type=click.Path(), help="Goal-tree JSON output path.")
@click.option("--csv", "csv_dir", type=click.Path(), help="Directory for CSV summaries.")
@click.option("--figures", "figures_dir", type=click.Path(), help="Directory for rendered figures.")
def run(kb_paths, package_name, event_path, answers_path, report_path, trace_path, csv_dir, figures_dir):
    """Run one scenario headless and write the report artifacts."""
    try:
        event_doc = json.loads(read_text(event_path))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo("cannot read event: %s" % exc, err=True)
        sys.exit(EXIT_ERROR)
    answers = []
    if answers_path:
        answers = [line.strip() for line in read_text(answers_path).splitlines() if line.strip()]
    try:
        if kb_paths:
            package = _load_kb_paths(kb_paths)
        else:
            name = package_name or event_doc.get("category", "")
            package = load_package(name)
    except (KBSyntaxError, StoreError, ValueError) as exc:
        click.echo("cannot load knowledge base: %s" % exc, err=True)
        sys.exit(EXIT_ERROR)

    code, report, trace, message = run_headless(package, event_doc, answers, ScenarioConfig())
    if code != 0:
        click.echo(message, err=True)
        sys.exit(code)

    report_text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if report_path:
        Path(report_path).write_text(report_text, encoding="utf-8")
    else:
        click.echo(report_text, nl=False)
    if trace_path:
        Path(trace_path).write_text(
            json.dumps(trace, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    if csv_dir:
        from .reporting import write_csv_summaries

        for path in write_csv_summaries(report, Path(csv_dir)):
            click.echo("wrote %s" % path, err=True)
    if figures_dir:
        from .reporting import render_figures

        for path in render_figures(report, Path(figures_dir)):
            click.echo("wrote %s" % path, err=True)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_dir", type=click.Path(), default="ace-data",
              help="Directory for session journals.")
@click.option("--packages", "packages_dir", type=click.Path(exists=True), default=None,
              help="Alternative scenario-package directory.")
def serve(port, host, data_dir, packages_dir):
    """Serve the /v1 session API."""
    import uvicorn

    from .service import create_app

    app = create_app(Path(data_dir), Path(packages_dir) if packages_dir else None)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--kind", required=True,
              type=click.Choice(["plane", "surface", "freq", "potential", "regression", "dynamical"]))
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--degree", default=2, show_default=True, help="Surface or regression degree.")
@click.option("--order", default=1, show_default=True, help="Autoregressive order.")
@click.option("--intercept/--no-intercept", default=True, show_default=True)
@click.option("--eps", default=1e-3, show_default=True, help="Potential floor parameter.")
@click.option("--margin", default=1e-6, show_default=True, help="Undecided band half-width.")
def fit(kind, input_path, output_path, degree, order, intercept, eps, margin):
    """Fit a model from a CSV file and write it as JSON."""
    text = read_text(input_path)
    try:
        if kind in ("plane", "surface", "freq", "potential"):
            table = parse_experience_csv(text)
            if kind == "plane":
                model = fit_separating_plane(table, margin=margin)
            elif kind == "surface":
                model = fit_separating_surface(table, degree=degree, margin=margin)
            elif kind == "freq":
                model = fit_frequencies(table)
            else:
                model = PotentialModel.from_table(table, eps=eps, margin=margin)
            diagnostics = None
        elif kind == "regression":
            samples = parse_regression_csv(text)
            model, diagnostics = fit_regression(samples, degree=1 if degree is None else degree,
                                                intercept=intercept)
        else:
            y, exo = parse_timeseries_csv(text)
            model, diagnostics = fit_dynamical(y, exo, order=order)
    except (ModelIOError, ValueError) as exc:
        click.echo("fit failed: %s" % exc, err=True)
        sys.exit(EXIT_ERROR)
    save_model(model, output_path)
    summary = {"kind": kind, "out": str(output_path)}
    if diagnostics is not None:
        summary["r_squared"] = diagnostics.r_squared
        summary["samples"] = diagnostics.sample_count
    click.echo(json.dumps(summary, sort_keys=True))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
def classify(model_path, input_path):
    """Classify feature rows (CSV with an x1..xn header) with a saved model."""
    try:
        model = load_model(model_path)
        rows = parse_features_csv(read_text(input_path))
    except (ModelIOError, ValueError) as exc:
        click.echo("classify failed: %s" % exc, err=True)
        sys.exit(EXIT_ERROR)
    click.echo("row,outcome,score")
    for index, row in enumerate(rows, start=1):
        try:
            if isinstance(model, PotentialModel):
                decision = classify_potential(model, row)
                outcome = decision.outcome if decision.outcome is not None else "undecided"
                score = decision.score
            elif hasattr(model, "score"):
                decision = classify_geometric(model, row)
                outcome = decision.outcome if decision.outcome is not None else "undecided"
                score = decision.score
            else:
                outcome = classify_frequencies(model, row)
                score = ""
        except ValueError as exc:
            click.echo("classify failed on row %d: %s" % (index, exc), err=True)
            sys.exit(EXIT_ERROR)
        click.echo("%d,%s,%s" % (index, outcome, "" if score is None else score))


if __name__ == "__main__":
    main()
