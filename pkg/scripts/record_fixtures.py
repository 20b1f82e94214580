#!/usr/bin/env python3
"""Record real gateway responses as console contract fixtures.

Runs the FastAPI app in-process and dumps the JSON bodies the operator
console is tested against.  Re-run after any gateway change:

    python3 scripts/record_fixtures.py
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from ace.service import create_app  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
OUT = ROOT / "frontend" / "tests" / "fixtures"


def dump(name, payload):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print("wrote", path.relative_to(ROOT))


def main():
    event = json.loads((FIXTURES / "blast_furnace_event.json").read_text())
    partner_event = json.loads((FIXTURES / "partner_change_event.json").read_text())

    client = TestClient(create_app())
    dump("packages.json", client.get("/v1/packages").json())

    # straight-through production run
    created = client.post(
        "/v1/sessions", json={"package": "production", "event": event}
    ).json()
    dump("production_session_done.json", created)
    sid = created["id"]
    dump("production_report.json", client.get("/v1/sessions/%s/report" % sid).json())
    dump("production_trace.json", client.get("/v1/sessions/%s/trace" % sid).json())
    dump("production_journal.json", client.get("/v1/sessions/%s/journal" % sid).json())

    # market partner run: report carries the decision table for the toggle
    created = client.post(
        "/v1/sessions", json={"package": "market", "event": partner_event}
    ).json()
    market_report = client.get("/v1/sessions/%s/report" % created["id"]).json()
    dump("market_report.json", market_report)
    table = market_report["market"]["consequences"]["table"]
    for criterion in ("pessimistic", "optimistic", "pragmatic"):
        body = dict(table, criterion=criterion)
        dump("choice_%s.json" % criterion, client.post("/v1/choices", json=body).json())

    # intake validation error body
    invalid = client.post("/v1/sessions", json={"package": "production", "event": {"id": "x"}})
    dump("intake_validation_error.json", {"status": invalid.status_code, "body": invalid.json()})

    # dialogue flow against an asking package
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        package_dir = Path(tmp) / "packages" / "production"
        package_dir.mkdir(parents=True)
        (package_dir / "rules.kb").write_text(
            'handle_event(E) <- occurred_event(E), '
            'ask("Confirm the area is evacuated?", yes), '
            'ask("Is the water still rising?", no), '
            'describe_event(E).\n'
        )
        ask_client = TestClient(
            create_app(data_dir=Path(tmp) / "data", packages_dir=Path(tmp) / "packages")
        )
        created = ask_client.post(
            "/v1/sessions", json={"package": "production", "event": event}
        ).json()
        sid = created["id"]
        dump("ask_session_awaiting.json", created)
        question = ask_client.get("/v1/sessions/%s/question" % sid).json()
        dump("ask_question_1.json", question)
        stale = ask_client.post(
            "/v1/sessions/%s/answer" % sid, json={"question_id": "q99", "answer": "yes"}
        )
        dump("ask_stale_answer.json", {"status": stale.status_code, "body": stale.json()})
        after_first = ask_client.post(
            "/v1/sessions/%s/answer" % sid,
            json={"question_id": question["question_id"], "answer": "yes"},
        ).json()
        dump("ask_session_between.json", after_first)
        question2 = ask_client.get("/v1/sessions/%s/question" % sid).json()
        dump("ask_question_2.json", question2)
        done = ask_client.post(
            "/v1/sessions/%s/answer" % sid,
            json={"question_id": question2["question_id"], "answer": "no"},
        ).json()
        dump("ask_session_done.json", done)
        dump("ask_report.json", ask_client.get("/v1/sessions/%s/report" % sid).json())
        dump("ask_trace.json", ask_client.get("/v1/sessions/%s/trace" % sid).json())
        dump("ask_journal.json", ask_client.get("/v1/sessions/%s/journal" % sid).json())


if __name__ == "__main__":
    main()
