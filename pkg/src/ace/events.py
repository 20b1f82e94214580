"""Critical-event intake: the structured document every scenario starts from.

Free-text semantic analysis is out of scope; the narrative is stored verbatim
and the pipeline runs on operator-supplied tags, affected assets and
measurements.  The valid category/subtype pairs mirror the three event
families: production, market and region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

CATEGORY_SUBTYPES = {
    "production": (
        "emergency",
        "equipment-damage",
        "infrastructure-failure",
    ),
    "market": (
        "new-competitive-goods",
        "new-segment",
        "partner-financial-change",
    ),
    "region": (
        "fx-change",
        "customs-change",
        "tax-change",
        "political-crisis",
        "energy-crisis",
        "ecocatastrophe",
    ),
}

STATUSES = ("signal", "occurred")


class EventValidationError(ValueError):
    """Carries one message per offending field."""

    def __init__(self, errors: list):
        self.errors = errors
        super().__init__("; ".join("%s: %s" % (f, m) for f, m in errors))


@dataclass
class Measurement:
    value: float
    unit: str = ""


@dataclass
class CriticalEvent:
    id: str
    category: str
    subtype: str
    status: str = "occurred"  # "signal" while only a threat is being tracked
    timestamp: str = ""
    title: str = ""
    narrative: str = ""
    tags: list = field(default_factory=list)
    affected_assets: list = field(default_factory=list)
    measurements: dict = field(default_factory=dict)  # name -> Measurement

    def measurement(self, name: str) -> Optional[float]:
        m = self.measurements.get(name)
        return m.value if m is not None else None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "subtype": self.subtype,
            "status": self.status,
            "timestamp": self.timestamp,
            "title": self.title,
            "narrative": self.narrative,
            "tags": list(self.tags),
            "affected_assets": list(self.affected_assets),
            "measurements": {
                name: {"value": m.value, "unit": m.unit}
                for name, m in self.measurements.items()
            },
        }


def fact_name(label: str) -> str:
    """Tag or asset label as a knowledge-base constant (lowercase, underscores)."""
    out = label.strip().lower().replace("-", "_").replace(" ", "_")
    return out


def validate_event(doc: dict) -> CriticalEvent:
    """Build a CriticalEvent from a JSON document, collecting field errors."""
    errors = []
    if not isinstance(doc, dict):
        raise EventValidationError([("event", "document must be a JSON object")])

    def need_str(name, required=True, default=""):
        value = doc.get(name, None)
        if value is None:
            if required:
                errors.append((name, "is required"))
            return default
        if not isinstance(value, str):
            errors.append((name, "must be a string"))
            return default
        return value

    event_id = need_str("id")
    category = need_str("category")
    subtype = need_str("subtype")
    status = doc.get("status", "occurred")
    if status not in STATUSES:
        errors.append(("status", "must be one of %s" % (STATUSES,)))
    if category and category not in CATEGORY_SUBTYPES:
        errors.append(("category", "unknown category %r" % category))
    elif category and subtype and subtype not in CATEGORY_SUBTYPES[category]:
        errors.append(
            (
                "subtype",
                "%r is not valid for category %r; expected one of %s"
                % (subtype, category, list(CATEGORY_SUBTYPES[category])),
            )
        )
    tags = doc.get("tags", [])
    if not isinstance(tags, list) or any(not isinstance(t, str) for t in tags):
        errors.append(("tags", "must be a list of strings"))
        tags = []
    assets = doc.get("affected_assets", [])
    if not isinstance(assets, list) or any(not isinstance(a, str) for a in assets):
        errors.append(("affected_assets", "must be a list of strings"))
        assets = []
    measurements = {}
    raw_measurements = doc.get("measurements", {})
    if not isinstance(raw_measurements, dict):
        errors.append(("measurements", "must be an object"))
        raw_measurements = {}
    for name, raw in raw_measurements.items():
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            measurements[name] = Measurement(float(raw))
        elif isinstance(raw, dict) and isinstance(raw.get("value"), (int, float)):
            measurements[name] = Measurement(
                float(raw["value"]), str(raw.get("unit", ""))
            )
        else:
            errors.append(
                ("measurements.%s" % name, "must be a number or {value, unit}")
            )
    if errors:
        raise EventValidationError(errors)
    return CriticalEvent(
        id=event_id,
        category=category,
        subtype=subtype,
        status=status,
        timestamp=need_str("timestamp", required=False),
        title=need_str("title", required=False),
        narrative=need_str("narrative", required=False),
        tags=tags,
        affected_assets=assets,
        measurements=measurements,
    )
