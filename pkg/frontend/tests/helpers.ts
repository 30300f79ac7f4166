/**
 * Shared test utilities: a synthetic DOM (no global registration) and
 * typed access to the captured live-service fixtures.
 */

import { Window } from "happy-dom";

import type { FetchLike } from "../src/api.js";
import type {
  MetricsReport,
  SelectionResponse,
  SessionState,
} from "../src/wire.js";
import { CANNED } from "./canned.js";

export interface Dom {
  win: InstanceType<typeof Window>;
  document: Document;
  root: HTMLElement;
}

/** Fresh synthetic DOM with a mount point attached to the body. */
export function newDom(): Dom {
  const win = new Window();
  const document = win.document as unknown as Document;
  const root = document.createElement("div");
  document.body.appendChild(root);
  return { win, document, root };
}

/** Deep-copied session state fixture (tests may mutate their copy). */
export function initialState(): SessionState {
  return structuredClone(CANNED.initial) as unknown as SessionState;
}

/** Deep-copied empty-knowledge-base session fixture. */
export function emptyKbState(): SessionState {
  return structuredClone(CANNED.emptyKb) as unknown as SessionState;
}

export interface CannedStep {
  op: "select" | "undo";
  name: string;
  row: number | null;
  col: number | null;
  correct: boolean;
  response: SelectionResponse;
  metrics: MetricsReport;
}

/** The captured mutation sequence (deep copy). */
export function cannedSteps(): CannedStep[] {
  return structuredClone(CANNED.steps) as unknown as CannedStep[];
}

export interface RecordedPost {
  path: string;
  body: Record<string, unknown>;
}

export interface ScriptedServer {
  fetchImpl: FetchLike;
  posts: RecordedPost[];
}

/**
 * A fetch double that replays the captured session: POST /sessions
 * returns the given initial state, and each mutation (selection or
 * undo) consumes the next captured step in order, with GET /metrics
 * serving that step's captured metrics. Requests outside the script
 * fail loudly.
 */
export function scriptedServer(
  initial: SessionState = initialState(),
  steps: CannedStep[] = cannedSteps(),
): ScriptedServer {
  let applied = 0;
  const posts: RecordedPost[] = [];
  const respond = (body: unknown) => ({
    status: 200,
    text: async () => JSON.stringify(body),
  });
  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (method === "POST" && path === "/sessions") {
      return respond(initial);
    }
    if (
      method === "POST" &&
      (path.endsWith("/selections") || path.endsWith("/undo"))
    ) {
      posts.push({ path, body: JSON.parse(init?.body ?? "{}") });
      const step = steps[applied];
      if (step === undefined) {
        throw new Error(`script exhausted at mutation ${applied + 1}`);
      }
      applied += 1;
      return respond(step.response);
    }
    if (method === "GET" && path.endsWith("/metrics")) {
      const step = steps[applied - 1];
      if (step === undefined) {
        throw new Error("metrics requested before any mutation");
      }
      return respond(step.metrics);
    }
    throw new Error(`unexpected request: ${method} ${path}`);
  };
  return { fetchImpl, posts };
}

/** Poll until `predicate` holds (real timers), failing after `timeoutMs`. */
export async function waitUntil(
  predicate: () => boolean,
  what: string,
  timeoutMs = 5000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}
