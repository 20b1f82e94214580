import { readFileSync } from "node:fs";
import type { FetchLike, ResponseLike } from "../src/api.js";

export function fixture<T = any>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export interface ExpectedCall {
  method: string;
  path: string;
  status?: number;
  body: unknown;
  /** Inspect the request body the client sent. */
  check?: (requestBody: unknown) => void;
}

/**
 * Fetch double that serves recorded gateway responses in call order and
 * fails loudly on any unexpected request.
 */
export function sequenceFetch(calls: ExpectedCall[]): FetchLike & { remaining: () => number } {
  const queue = [...calls];
  const impl: FetchLike = async (url, init) => {
    const next = queue.shift();
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (!next) throw new Error(`unexpected request ${method} ${path}`);
    if (next.method !== method || next.path !== path) {
      throw new Error(
        `expected ${next.method} ${next.path}, got ${method} ${path}`,
      );
    }
    if (next.check) next.check(init?.body ? JSON.parse(String(init.body)) : undefined);
    const status = next.status ?? (method === "POST" && path === "/v1/sessions" ? 201 : 200);
    const response: ResponseLike = {
      status,
      ok: status < 400,
      json: async () => next.body,
    };
    return response;
  };
  return Object.assign(impl, { remaining: () => queue.length });
}

export function downFetch(): FetchLike {
  return async () => {
    throw new Error("connection refused");
  };
}
