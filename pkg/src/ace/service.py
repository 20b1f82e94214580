"""HTTP session service under /v1.

Sessions live in memory with append-only journals on disk; knowledge-base
packages and reference data are immutable and shared.  Uploaded CSV tables
(experience, time series, decision) become available to later sessions.
"""

from __future__ import annotations

import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .classifiers import PotentialModel, fit_frequencies, fit_separating_plane
from .events import EventValidationError, validate_event
from .modelio import (
    ModelIOError,
    parse_decision_csv,
    parse_experience_csv,
    parse_regression_csv,
    parse_timeseries_csv,
)
from .forecast import fit_dynamical, fit_regression
from .scenarios import ScenarioConfig, available_packages, load_package
from .sessions import AnswerTypeError, Session, SessionError, StaleQuestionError


class SessionRequest(BaseModel):
    package: str
    event: dict


class AnswerRequest(BaseModel):
    question_id: str
    answer: object = None


class TableUpload(BaseModel):
    name: str
    kind: str  # experience | timeseries | regression | decision
    csv: str


class ChoiceRequest(BaseModel):
    variants: list
    situations: list
    values: list
    probabilities: Optional[list] = None
    criterion: str


def create_app(
    data_dir: Optional[Path] = None,
    packages_dir: Optional[Path] = None,
    config: Optional[ScenarioConfig] = None,
) -> FastAPI:
    app = FastAPI(title="adaptive control engine", version="1")
    state = {
        "sessions": {},
        "packages": {},
        "tables": {},
        "models": {},
        "data_dir": Path(data_dir) if data_dir else None,
        "packages_dir": Path(packages_dir) if packages_dir else None,
        "config": config or ScenarioConfig(),
    }
    if state["data_dir"]:
        state["data_dir"].mkdir(parents=True, exist_ok=True)
    app.state.engine = state

    def get_package(name: str):
        if name not in state["packages"]:
            try:
                state["packages"][name] = load_package(name, state["packages_dir"])
            except Exception as exc:  # noqa: BLE001
                raise HTTPException(status_code=404, detail=str(exc)) from exc
        return state["packages"][name]

    def get_session(session_id: str) -> Session:
        session = state["sessions"].get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="no session %r" % session_id)
        return session

    @app.get("/v1/packages")
    def packages():
        return {"packages": available_packages(state["packages_dir"])}

    @app.post("/v1/sessions", status_code=201)
    def create_session(request: SessionRequest):
        package = get_package(request.package)
        try:
            event = validate_event(request.event)
        except EventValidationError as exc:
            raise HTTPException(
                status_code=422,
                detail=[{"field": field, "message": message} for field, message in exc.errors],
            ) from exc
        session_id = uuid.uuid4().hex[:12]
        journal = None
        if state["data_dir"]:
            journal = state["data_dir"] / ("session-%s.jsonl" % session_id)
        session = Session(
            package,
            event,
            state["config"],
            session_id=session_id,
            journal_path=journal,
            tables=state["tables"],
            models=state["models"],
        )
        state["sessions"][session.id] = session
        return session.to_json()

    @app.get("/v1/sessions/{session_id}")
    def show_session(session_id: str):
        return get_session(session_id).to_json()

    @app.get("/v1/sessions/{session_id}/question")
    def show_question(session_id: str):
        session = get_session(session_id)
        if session.state != "awaiting-answer":
            raise HTTPException(status_code=409, detail="session is not awaiting an answer")
        return session.pending

    @app.post("/v1/sessions/{session_id}/answer")
    def submit_answer(session_id: str, request: AnswerRequest):
        session = get_session(session_id)
        try:
            session.submit_answer(request.question_id, request.answer)
        except StaleQuestionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except AnswerTypeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except SessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return session.to_json()

    @app.get("/v1/sessions/{session_id}/report")
    def show_report(session_id: str):
        session = get_session(session_id)
        if session.report is None:
            raise HTTPException(status_code=409, detail="session has no report (state %s)" % session.state)
        return session.report

    @app.get("/v1/sessions/{session_id}/trace")
    def show_trace(session_id: str):
        session = get_session(session_id)
        if session.trace is None:
            raise HTTPException(status_code=409, detail="session has no trace yet")
        return session.trace

    @app.get("/v1/sessions/{session_id}/journal")
    def show_journal(session_id: str):
        return {"entries": get_session(session_id).journal_entries()}

    @app.post("/v1/choices")
    def evaluate_choice(request: ChoiceRequest):
        """Re-rank a decision table under a criterion; the console's toggle."""
        from .decisions import DecisionError, DecisionTable, choose

        try:
            table = DecisionTable(
                request.variants, request.situations, request.values, request.probabilities
            )
            result = choose(table, request.criterion, request.probabilities)
        except DecisionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {
            "criterion": result.criterion,
            "variant": result.label,
            "variant_index": result.index,
            "value": result.value,
            "per_variant": list(result.per_variant),
        }

    @app.post("/v1/data/tables", status_code=201)
    def upload_table(upload: TableUpload):
        try:
            if upload.kind == "experience":
                table = parse_experience_csv(upload.csv)
                state["models"].setdefault("freq_" + upload.name, fit_frequencies(table))
                state["models"].setdefault("potential_" + upload.name, PotentialModel.from_table(table))
                if table.class_count == 2:
                    state["models"].setdefault("plane_" + upload.name, fit_separating_plane(table))
                payload = {"rows": len(table.rows), "dimension": table.dimension}
            elif upload.kind == "timeseries":
                y, exo = parse_timeseries_csv(upload.csv)
                model, diag = fit_dynamical(y, exo, order=1 if len(y) > 2 else 0)
                state["models"]["dynamical_" + upload.name] = model
                payload = {"points": len(y), "r_squared": diag.r_squared}
            elif upload.kind == "regression":
                samples = parse_regression_csv(upload.csv)
                model, diag = fit_regression(samples)
                state["models"]["regression_" + upload.name] = model
                payload = {"samples": len(samples), "r_squared": diag.r_squared}
            elif upload.kind == "decision":
                state["tables"][upload.name] = parse_decision_csv(upload.csv)
                payload = {"variants": len(state["tables"][upload.name].variants)}
            else:
                raise HTTPException(
                    status_code=422,
                    detail="kind must be experience, timeseries, regression or decision",
                )
        except (ModelIOError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"name": upload.name, "kind": upload.kind, **payload}

    return app
