/**
 * Session view controller: intake, the question/answer loop, results.
 *
 * Question history is append-only and reconciled from the gateway's own
 * `questions_asked` list and journal, so a page reload rebuilds the same
 * history. Long-polling is a plain poll loop; the interval is configurable
 * and tests drive `refresh` directly.
 */

import { ApiError, GatewayClient } from "./api.js";
import type { Question, Report, SessionInfo, TraceNode } from "./types.js";

export interface HistoryEntry {
  question: Question;
  answer?: string;
}

export type Phase = "idle" | "running" | "awaiting-answer" | "done" | "failed";

export interface SessionView {
  session: SessionInfo | null;
  phase: Phase;
  history: HistoryEntry[];
  report: Report | null;
  trace: TraceNode | null;
  staleQuestion: boolean;
  banner: string | null;
  startedAtMs: number | null;
}

export class SessionController {
  readonly client: GatewayClient;
  readonly view: SessionView;
  private readonly clock: () => number;

  constructor(client: GatewayClient, clock: () => number = () => Date.now()) {
    this.client = client;
    this.clock = clock;
    this.view = {
      session: null,
      phase: "idle",
      history: [],
      report: null,
      trace: null,
      staleQuestion: false,
      banner: null,
      startedAtMs: null,
    };
  }

  elapsedSeconds(): number {
    if (this.view.startedAtMs === null) return 0;
    return Math.max(0, (this.clock() - this.view.startedAtMs) / 1000);
  }

  /** POST the intake form's event document and absorb the created session. */
  async start(pkg: string, event: Record<string, unknown>): Promise<SessionView> {
    this.view.startedAtMs = this.clock();
    try {
      const session = await this.client.createSession(pkg, event);
      this.absorb(session);
      this.view.banner = null;
    } catch (error) {
      this.handleError(error);
      throw error;
    }
    if (this.view.phase === "done") await this.loadResults();
    return this.view;
  }

  /** Pull the session state and reconcile; used by the poll loop. */
  async refresh(): Promise<SessionView> {
    const session = this.view.session;
    if (!session) return this.view;
    try {
      const fresh = await this.client.getSession(session.id);
      this.absorb(fresh);
      this.view.banner = null;
      this.view.staleQuestion = false;
    } catch (error) {
      this.handleError(error);
    }
    if (this.view.phase === "done" && !this.view.report) await this.loadResults();
    return this.view;
  }

  /** Answer the pending question; a stale id prompts a refresh instead. */
  async answer(text: string): Promise<SessionView> {
    const session = this.view.session;
    const pending = session?.question;
    if (!session || !pending) {
      throw new Error("no question is pending");
    }
    try {
      const fresh = await this.client.submitAnswer(session.id, pending.question_id, text);
      this.recordAnswer(pending, text);
      this.absorb(fresh);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // someone else answered first: flag and re-sync
        this.view.staleQuestion = true;
        await this.refresh();
        return this.view;
      }
      this.handleError(error);
      throw error;
    }
    if (this.view.phase === "done") await this.loadResults();
    return this.view;
  }

  /** Poll until the session needs an operator or finished. */
  async pollUntilSettled(maxPolls = 120, sleep?: (ms: number) => Promise<void>): Promise<SessionView> {
    for (let i = 0; i < maxPolls; i += 1) {
      const phase = this.view.phase;
      if (phase === "awaiting-answer" || phase === "done" || phase === "failed") break;
      if (sleep) await sleep(500);
      await this.refresh();
    }
    return this.view;
  }

  async loadResults(): Promise<void> {
    const session = this.view.session;
    if (!session) return;
    try {
      this.view.report = await this.client.getReport(session.id);
      this.view.trace = await this.client.getTrace(session.id);
    } catch (error) {
      this.handleError(error);
    }
  }

  /** Rebuild the question history from the journal after a page reload. */
  async rebuildFromJournal(sessionId: string): Promise<SessionView> {
    const { entries } = await this.client.getJournal(sessionId);
    const history: HistoryEntry[] = [];
    for (const entry of entries) {
      if (entry.type === "question") {
        history.push({
          question: {
            question_id: String(entry.question_id),
            text: String(entry.text),
            kind: String(entry.kind ?? "yes_no"),
          },
        });
      } else if (entry.type === "answer") {
        const open = history.find(
          (h) => h.question.question_id === entry.question_id && h.answer === undefined,
        );
        if (open) open.answer = String(entry.answer);
      }
    }
    this.view.history = history;
    const fresh = await this.client.getSession(sessionId);
    this.absorb(fresh);
    if (this.view.phase === "done") await this.loadResults();
    return this.view;
  }

  // -- internals -------------------------------------------------------------

  private absorb(session: SessionInfo): void {
    this.view.session = session;
    this.view.phase = session.state as Phase;
    // append-only reconciliation: any question the gateway lists that the
    // history lacks gets appended in order; entries are never dropped
    for (const question of session.questions_asked) {
      const known = this.view.history.some(
        (h) => h.question.question_id === question.question_id,
      );
      if (!known) this.view.history.push({ question });
    }
  }

  private recordAnswer(question: Question, answer: string): void {
    const entry = this.view.history.find(
      (h) => h.question.question_id === question.question_id,
    );
    if (entry) entry.answer = answer;
    else this.view.history.push({ question, answer });
  }

  private handleError(error: unknown): void {
    if (error instanceof ApiError && error.retryable) {
      this.view.banner = "gateway unreachable; retry";
      return;
    }
    if (error instanceof ApiError) {
      this.view.banner = `request failed (${error.status})`;
      return;
    }
    this.view.banner = String(error);
  }
}
