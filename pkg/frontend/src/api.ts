/**
 * HTTP client for the spelling service.
 *
 * Mutating calls (selections and undo) carry a client-generated nonce so
 * that retrying a request whose response was lost in transit is
 * idempotent: the server replays the stored response instead of applying
 * the operation twice. Only transport failures are retried; HTTP error
 * statuses are surfaced immediately as {@link ApiError}.
 */

import type {
  KbInfo,
  KbStats,
  MetricsReport,
  SelectionResponse,
  SessionOptions,
  SessionState,
} from "./wire.js";

/** Server-reported request failure (4xx/5xx). */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

/** Subset of `fetch` the client needs; injectable for tests. */
export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{ status: number; text(): Promise<string> }>;

/** Fresh idempotency nonce for one user selection. */
export function newNonce(): string {
  const cryptoApi = globalThis.crypto;
  if (cryptoApi && typeof cryptoApi.randomUUID === "function") {
    return cryptoApi.randomUUID();
  }
  return `n-${Date.now().toString(36)}-${Math.random().toString(36).slice(2)}`;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export interface ClientOptions {
  fetchImpl?: FetchLike;
  /** Attempts per mutating request (first try included). */
  retries?: number;
  /** Delay between retry attempts, in milliseconds. */
  retryDelayMs?: number;
}

/** Typed client for the session API. */
export class SpellerClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly retries: number;
  private readonly retryDelayMs: number;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl =
      options.fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
    this.retries = options.retries ?? 3;
    this.retryDelayMs = options.retryDelayMs ?? 250;
  }

  uploadKb(name: string, text: string, mode = "table"): Promise<KbStats> {
    return this.request("POST", "/kbs", { name, text, mode });
  }

  async listKbs(): Promise<KbInfo[]> {
    const body = await this.request<{ kbs: KbInfo[] }>("GET", "/kbs");
    return body.kbs;
  }

  createSession(options: SessionOptions): Promise<SessionState> {
    return this.request("POST", "/sessions", options);
  }

  getState(id: string): Promise<SessionState & { metrics: MetricsReport | null }> {
    return this.request("GET", `/sessions/${id}`);
  }

  /** Select the cell at (row, col); retried idempotently via `nonce`. */
  select(
    id: string,
    row: number,
    col: number,
    correct: boolean,
    nonce: string,
  ): Promise<SelectionResponse> {
    return this.mutate(`/sessions/${id}/selections`, {
      row,
      col,
      correct,
      nonce,
    });
  }

  /** Select the undo symbol; retried idempotently via `nonce`. */
  undo(id: string, correct: boolean, nonce: string): Promise<SelectionResponse> {
    return this.mutate(`/sessions/${id}/undo`, { correct, nonce });
  }

  metrics(id: string): Promise<MetricsReport> {
    return this.request("GET", `/sessions/${id}/metrics`);
  }

  deleteSession(id: string): Promise<{ id: string; deleted: boolean }> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  /** POST with transport-failure retries; safe because `body.nonce` set. */
  private async mutate<T>(path: string, body: unknown): Promise<T> {
    let lastError: unknown;
    for (let attempt = 0; attempt < this.retries; attempt += 1) {
      if (attempt > 0) {
        await sleep(this.retryDelayMs);
      }
      try {
        return await this.request<T>("POST", path, body);
      } catch (error) {
        if (error instanceof ApiError) {
          throw error; // the server answered; do not re-apply
        }
        lastError = error;
      }
    }
    throw lastError;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    if (response.status >= 400) {
      let detail = text;
      try {
        const parsed = JSON.parse(text) as { detail?: unknown };
        if (typeof parsed.detail === "string") {
          detail = parsed.detail;
        }
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }
}
