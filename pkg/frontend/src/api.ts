/**
 * Gateway client for the /v1 API.
 *
 * Every number and money string the console shows comes from these response
 * bodies verbatim; the client never computes domain values. Transport
 * failures and 5xx responses are marked retryable so the UI can offer a
 * retry banner instead of dying.
 */

import type {
  ChoiceResponse,
  DecisionTablePayload,
  JournalEntry,
  Question,
  Report,
  SessionInfo,
  TraceNode,
} from "./types.js";

export interface ResponseLike {
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<ResponseLike>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;
  readonly retryable: boolean;

  constructor(message: string, status: number, detail: unknown, retryable: boolean) {
    super(message);
    this.status = status;
    this.detail = detail;
    this.retryable = retryable;
  }
}

/** Field-level messages from a 422 intake rejection. */
export function fieldErrors(error: ApiError): Map<string, string> {
  const out = new Map<string, string>();
  if (Array.isArray(error.detail)) {
    for (const item of error.detail as { field?: string; message?: string }[]) {
      if (item.field && item.message) out.set(item.field, item.message);
    }
  }
  return out;
}

export class GatewayClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl =
      fetchImpl ?? ((url, init) => fetch(url, init) as unknown as Promise<ResponseLike>);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: ResponseLike;
    try {
      response = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ApiError(`gateway unreachable: ${String(cause)}`, 0, null, true);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const detail = (payload as { detail?: unknown } | null)?.detail ?? payload;
      throw new ApiError(
        `${method} ${path} failed with ${response.status}`,
        response.status,
        detail,
        response.status >= 500,
      );
    }
    return payload as T;
  }

  listPackages(): Promise<{ packages: string[] }> {
    return this.request("GET", "/v1/packages");
  }

  createSession(pkg: string, event: Record<string, unknown>): Promise<SessionInfo> {
    return this.request("POST", "/v1/sessions", { package: pkg, event });
  }

  getSession(id: string): Promise<SessionInfo> {
    return this.request("GET", `/v1/sessions/${id}`);
  }

  getQuestion(id: string): Promise<Question> {
    return this.request("GET", `/v1/sessions/${id}/question`);
  }

  submitAnswer(id: string, questionId: string, answer: string): Promise<SessionInfo> {
    return this.request("POST", `/v1/sessions/${id}/answer`, {
      question_id: questionId,
      answer,
    });
  }

  getReport(id: string): Promise<Report> {
    return this.request("GET", `/v1/sessions/${id}/report`);
  }

  getTrace(id: string): Promise<TraceNode> {
    return this.request("GET", `/v1/sessions/${id}/trace`);
  }

  getJournal(id: string): Promise<{ entries: JournalEntry[] }> {
    return this.request("GET", `/v1/sessions/${id}/journal`);
  }

  evaluateChoice(table: DecisionTablePayload, criterion: string): Promise<ChoiceResponse> {
    return this.request("POST", "/v1/choices", { ...table, criterion });
  }
}
