"""Report rendering: delimited summaries and figures next to the JSON.

The JSON report is the normative artifact; these renderers give operators a
quick look.  CSV summaries cover the measures and the consequence breakdown;
figures show the restoration timeline, per-measure expenses, the consequence
components, and the exchange-rate forecast when one exists.  All figures are
rendered headless to files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_measures_csv(report: dict, path: Path) -> bool:
    measures = report.get("measures")
    if not measures:
        return False
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["id", "description", "start_day", "end_day", "duration_days",
             "prerequisites", "total", "currency"]
        )
        for m in measures:
            total = m["expenses"]["total"]
            writer.writerow(
                [
                    m["id"],
                    m["description"],
                    m["start_day"],
                    m["end_day"],
                    m["duration_days"],
                    " ".join(m["prerequisites"]),
                    total["amount"],
                    total["currency"],
                ]
            )
    return True


def write_consequences_csv(report: dict, path: Path) -> bool:
    consequences = report.get("consequences")
    if not consequences:
        return False
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "amount", "currency"])
        for key in ("sale_volume_change", "penalties", "account_payable_increase", "total"):
            value = consequences[key]
            writer.writerow([key, value["amount"], value["currency"]])
    return True


def write_csv_summaries(report: dict, directory: Path) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if write_measures_csv(report, directory / "measures.csv"):
        written.append(directory / "measures.csv")
    if write_consequences_csv(report, directory / "consequences.csv"):
        written.append(directory / "consequences.csv")
    return written


def _money_value(money: dict) -> float:
    return float(money["amount"])


def render_timeline(report: dict, path: Path) -> bool:
    measures = report.get("measures")
    if not measures:
        return False
    fig, ax = plt.subplots(figsize=(9, 0.5 * len(measures) + 1.5))
    labels = []
    for i, m in enumerate(reversed(measures)):
        ax.barh(i, m["end_day"] - m["start_day"], left=m["start_day"], height=0.6)
        labels.append(m["id"])
    ax.set_yticks(range(len(measures)))
    ax.set_yticklabels(labels)
    ax.set_xlabel("day")
    ax.set_title("restoration schedule")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def render_expenses(report: dict, path: Path) -> bool:
    measures = report.get("measures")
    if not measures:
        return False
    fig, ax = plt.subplots(figsize=(9, 4))
    ids = [m["id"] for m in measures]
    totals = [_money_value(m["expenses"]["total"]) for m in measures]
    ax.bar(ids, totals)
    ax.set_ylabel("expenses")
    ax.set_title("expense sheet per measure")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def render_consequences(report: dict, path: Path) -> bool:
    consequences = report.get("consequences")
    if not consequences:
        return False
    parts = ["sale_volume_change", "penalties", "account_payable_increase"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(parts, [_money_value(consequences[p]) for p in parts])
    ax.set_title("consequence components")
    ax.tick_params(axis="x", labelrotation=15)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def render_forecast(report: dict, path: Path) -> bool:
    regional = report.get("regional") or {}
    forecast = regional.get("forecast")
    if not forecast:
        return False
    fig, ax = plt.subplots(figsize=(7, 4))
    rates = forecast["rates"]
    ax.plot(range(1, len(rates) + 1), rates, marker="o")
    ax.axhline(forecast["base_rate"], linestyle="--", linewidth=1)
    ax.set_xlabel("step")
    ax.set_ylabel("rate")
    ax.set_title("exchange-rate forecast")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def render_figures(report: dict, directory: Path) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, renderer in (
        ("timeline.png", render_timeline),
        ("expenses.png", render_expenses),
        ("consequences.png", render_consequences),
        ("forecast.png", render_forecast),
    ):
        target = directory / name
        if renderer(report, target):
            written.append(target)
    return written
