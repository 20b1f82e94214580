"""Scenario sessions: drive an inference run, suspend on operator questions,

resume on answers, journal every step.

A session wraps the solver generator.  Between requests the suspended
generator simply sits on the session object; submitting the answer sends it
into the generator and the run continues.  The journal is an append-only
JSON-lines file; replaying it recreates the exact session state after a
crash.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .engine import Ask
from .events import CriticalEvent, validate_event
from .scenarios import ScenarioConfig, ScenarioPackage, assemble_report, scenario_solver
from .scenarios.runner import Recorder


class SessionError(ValueError):
    pass


class StaleQuestionError(SessionError):
    pass


class AnswerTypeError(SessionError):
    pass


@dataclass
class AnswerRecord:
    session_id: str
    question_id: str
    answer: object
    timestamp: float


class Session:
    """State machine: running -> awaiting-answer <-> running -> done | failed."""

    def __init__(
        self,
        package: ScenarioPackage,
        event: CriticalEvent,
        config: Optional[ScenarioConfig] = None,
        session_id: Optional[str] = None,
        journal_path: Optional[Path] = None,
        clock: Optional[Callable[[], float]] = None,
        tables: Optional[dict] = None,
        models: Optional[dict] = None,
    ):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.package_name = package.name
        self.event = event
        self.state = "running"
        self.pending: Optional[dict] = None  # {"question_id", "text", "kind"}
        self.report: Optional[dict] = None
        self.trace: Optional[dict] = None
        self.error: Optional[str] = None
        self.answers: list = []
        self.questions_asked: list = []
        self._clock = clock or time.time
        self._journal_path = journal_path
        self._question_counter = 0
        solver, goal, recorder = scenario_solver(event, package, config)
        if tables:
            solver.tables.update(tables)
        if models:
            solver.models.update(models)
        self._solver = solver
        self._recorder: Recorder = recorder
        self._generator = solver.solve(goal, max_solutions=1)
        self._journal(
            {
                "type": "created",
                "session": self.id,
                "package": package.name,
                "event": event.to_json(),
            }
        )
        self._drive(first=True)

    # -- lifecycle ----------------------------------------------------------

    def _drive(self, send=None, first=False) -> None:
        self.state = "running"
        self.pending = None
        try:
            item = next(self._generator) if first else self._generator.send(send)
        except StopIteration:
            self._finish_without_solution()
            return
        except Exception as exc:  # noqa: BLE001 - fail the session, keep the service up
            self._fail("%s: %s" % (type(exc).__name__, exc))
            return
        if isinstance(item, Ask):
            self._question_counter += 1
            self.pending = {
                "question_id": "q%d" % self._question_counter,
                "text": item.question,
                "kind": item.kind,
            }
            self.questions_asked.append(dict(self.pending))
            self.state = "awaiting-answer"
            self._journal({"type": "question", "session": self.id, **self.pending})
            return
        # a Solution: assemble the report and stop the search
        self.report = assemble_report(self.event, self._recorder, item.tree)
        self.trace = item.tree
        self.state = "done"
        self._generator.close()
        self._journal({"type": "done", "session": self.id})

    def _finish_without_solution(self) -> None:
        tree = self._solver.failure_tree()
        self.trace = tree
        self._fail("the knowledge base could not prove the scenario goal")

    def _fail(self, message: str) -> None:
        self.state = "failed"
        self.error = message
        if self.trace is None:
            self.trace = self._solver.failure_tree()
        self._journal({"type": "failed", "session": self.id, "error": message})

    def submit_answer(self, question_id: str, answer) -> None:
        if self.state != "awaiting-answer" or self.pending is None:
            raise SessionError("session %s is not awaiting an answer" % self.id)
        if question_id != self.pending["question_id"]:
            raise StaleQuestionError(
                "answer for %r but the pending question is %r"
                % (question_id, self.pending["question_id"])
            )
        if self.pending["kind"] == "yes_no" and not _is_yes_no(answer):
            raise AnswerTypeError(
                "question %s expects yes or no, got %r" % (question_id, answer)
            )
        record = AnswerRecord(self.id, question_id, answer, self._clock())
        self.answers.append(record)
        self._journal(
            {
                "type": "answer",
                "session": self.id,
                "question_id": question_id,
                "answer": answer,
                "timestamp": record.timestamp,
            }
        )
        self._drive(send=answer)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "package": self.package_name,
            "event_id": self.event.id,
            "state": self.state,
            "question": self.pending,
            "questions_asked": list(self.questions_asked),
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def _journal(self, entry: dict) -> None:
        if self._journal_path is None:
            return
        with open(self._journal_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def journal_entries(self) -> list:
        if self._journal_path is None or not Path(self._journal_path).is_file():
            return []
        entries = []
        with open(self._journal_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries


def _is_yes_no(answer) -> bool:
    if isinstance(answer, bool):
        return True
    if isinstance(answer, str):
        return answer.strip().lower() in ("yes", "no", "y", "n", "true", "false")
    return False


def replay_session(journal_path: Path, package: ScenarioPackage, config=None) -> Session:
    """Recreate a session from its journal: same event, same answers."""
    entries = []
    with open(journal_path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entries.append(json.loads(line))
    created = next(e for e in entries if e["type"] == "created")
    event = validate_event(created["event"])
    session = Session(package, event, config, session_id=created["session"])
    for entry in entries:
        if entry["type"] == "answer" and session.state == "awaiting-answer":
            session.submit_answer(entry["question_id"], entry["answer"])
    return session


EXIT_OK = 0
EXIT_ERROR = 2
EXIT_ANSWERS_EXHAUSTED = 3


def run_headless(
    package: ScenarioPackage,
    event_doc: dict,
    answers: Optional[list] = None,
    config: Optional[ScenarioConfig] = None,
) -> tuple:
    """Scripted, deterministic run.

    Returns (exit code, report or None, trace or None, message)."""
    try:
        event = validate_event(event_doc)
    except Exception as exc:  # noqa: BLE001
        return EXIT_ERROR, None, None, "invalid event: %s" % exc
    script = list(answers or [])
    cursor = 0
    try:
        session = Session(package, event, config, clock=lambda: 0.0)
        while session.state == "awaiting-answer":
            if cursor >= len(script):
                return (
                    EXIT_ANSWERS_EXHAUSTED,
                    None,
                    session.trace,
                    "answers exhausted at question: %s" % session.pending["text"],
                )
            session.submit_answer(session.pending["question_id"], script[cursor])
            cursor += 1
    except Exception as exc:  # noqa: BLE001
        return EXIT_ERROR, None, None, str(exc)
    if session.state == "done":
        return EXIT_OK, session.report, session.trace, "ok"
    return EXIT_ERROR, None, session.trace, session.error or "failed"
