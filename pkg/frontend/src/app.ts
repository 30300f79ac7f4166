/**
 * Session controller: wires the API client, the phase cycle and the DOM.
 *
 * Invariants enforced here:
 *  - the grid is always rendered from the latest server snapshot, never
 *    from locally mutated state;
 *  - every accepted user selection produces exactly one POST (gated
 *    attempts produce none), carrying a fresh idempotency nonce;
 *  - one request in flight per session: input is disabled until the
 *    response is applied;
 *  - selections during the prediction phase are ignored.
 */

import { ApiError, newNonce, SpellerClient } from "./api.js";
import { Flasher, PhaseCycle } from "./cycle.js";
import type { Phase } from "./cycle.js";
import {
  applyCursor,
  applyFlash,
  clampCursor,
  moveCursor,
  renderGrid,
  renderLegend,
  renderMetrics,
  renderPhase,
  renderSpelled,
} from "./dom.js";
import type { Cursor } from "./dom.js";
import { buildView } from "./view.js";
import type { UiSessionView } from "./view.js";
import { cellAt } from "./wire.js";
import type {
  MetricsReport,
  SelectionResponse,
  SessionOptions,
  SessionState,
} from "./wire.js";

export interface AppOptions {
  /** Start with cosmetic row/column flashing enabled. */
  flashing?: boolean;
  /** Stimulus duration used by the cosmetic flasher, seconds. */
  sdS?: number;
  /** Inter-stimulus interval used by the cosmetic flasher, seconds. */
  isiS?: number;
  /** How long toasts stay visible, milliseconds. */
  toastMs?: number;
  /** Observer called after every full render (used by tests). */
  onUpdate?: (view: UiSessionView) => void;
}

interface Elements {
  spelled: HTMLElement;
  phase: HTMLElement;
  legendPanel: HTMLElement;
  legend: HTMLElement;
  grid: HTMLElement;
  metrics: HTMLElement;
  toast: HTMLElement;
}

function buildSkeleton(root: HTMLElement): Elements {
  const d = root.ownerDocument;
  root.textContent = "";
  root.classList.add("speller");
  if (!root.hasAttribute("tabindex")) {
    root.setAttribute("tabindex", "0");
  }
  const make = (parent: HTMLElement, className: string): HTMLElement => {
    const el = d.createElement("div");
    el.className = className;
    parent.appendChild(el);
    return el;
  };
  const spelled = make(root, "spelled");
  const phase = make(root, "phase");
  const stage = make(root, "stage");
  const legendPanel = make(stage, "legend-panel");
  const legend = make(legendPanel, "legend");
  const grid = make(stage, "grid");
  const metrics = make(root, "metrics");
  const toast = make(root, "toast");
  return { spelled, phase, legendPanel, legend, grid, metrics, toast };
}

/** Interactive spelling session bound to a DOM subtree. */
export class SpellerApp {
  readonly root: HTMLElement;
  readonly client: SpellerClient;
  readonly els: Elements;

  private readonly options: Required<Pick<AppOptions, "sdS" | "isiS" | "toastMs">> &
    AppOptions;
  private readonly cycle: PhaseCycle;
  private readonly flasher: Flasher;
  private state: SessionState | null = null;
  private metricsReport: MetricsReport | null = null;
  private lastView: UiSessionView | null = null;
  private cursor: Cursor = { row: 0, col: 0 };
  private inFlight = false;
  private errorArmed = false;
  private flashing: boolean;
  private toastTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(root: HTMLElement, client: SpellerClient, options: AppOptions = {}) {
    this.root = root;
    this.client = client;
    this.options = { sdS: 0.125, isiS: 0.125, toastMs: 4000, ...options };
    this.flashing = options.flashing ?? false;
    this.els = buildSkeleton(root);
    this.cycle = new PhaseCycle({
      onPhase: () => this.onPhaseChange(),
      onCountdown: () => this.renderPhaseOnly(),
    });
    this.flasher = new Flasher((target) => applyFlash(this.els.grid, target));
    this.root.addEventListener("keydown", (event) =>
      this.onKeydown(event as KeyboardEvent),
    );
  }

  get phase(): Phase {
    return this.cycle.phase;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  get errorIsArmed(): boolean {
    return this.errorArmed;
  }

  get flashingEnabled(): boolean {
    return this.flashing;
  }

  /** The last rendered view, or null before a session starts. */
  get view(): UiSessionView | null {
    return this.lastView;
  }

  get sessionState(): SessionState | null {
    return this.state;
  }

  /** Open a new session and render its initial matrix. */
  async start(options: SessionOptions): Promise<SessionState> {
    const state = await this.client.createSession(options);
    this.metricsReport = null;
    this.adopt(state);
    return state;
  }

  /** Re-attach to an existing session (e.g. after a reload). */
  async attach(sessionId: string): Promise<void> {
    const state = await this.client.getState(sessionId);
    this.metricsReport = state.metrics;
    this.adopt(state);
  }

  /**
   * Handle a click (or Enter) on the cell at (row, col). Returns true if
   * a selection was sent and applied; false if the attempt was ignored
   * (prediction phase, request in flight, padding cell, no session).
   */
  async selectCell(row: number, col: number): Promise<boolean> {
    if (this.state === null || this.inFlight || !this.cycle.inputAllowed()) {
      return false;
    }
    if (cellAt(this.state.matrix, row, col) === null) {
      return false;
    }
    return this.mutate((id, correct, nonce) =>
      this.client.select(id, row, col, correct, nonce),
    );
  }

  /** Send an undo through the dedicated endpoint (same gating rules). */
  async undo(): Promise<boolean> {
    if (this.state === null || this.inFlight || !this.cycle.inputAllowed()) {
      return false;
    }
    return this.mutate((id, correct, nonce) =>
      this.client.undo(id, correct, nonce),
    );
  }

  /**
   * Arm the error flag: the next selection is reported to the server as
   * a misrecognition (`correct: false`), feeding the accuracy and
   * error-rate metrics. The flag disarms once that selection is sent.
   */
  markError(): void {
    this.errorArmed = true;
    this.root.classList.add("error-armed");
  }

  /** Toggle the cosmetic row/column flashing. */
  setFlashing(on: boolean): void {
    this.flashing = on;
    this.syncFlasher();
  }

  /** Stop all timers; the instance must not be used afterwards. */
  dispose(): void {
    this.cycle.cancel();
    this.flasher.stop();
    if (this.toastTimer !== null) {
      clearTimeout(this.toastTimer);
      this.toastTimer = null;
    }
  }

  private async mutate(
    send: (
      id: string,
      correct: boolean,
      nonce: string,
    ) => Promise<SelectionResponse>,
  ): Promise<boolean> {
    const state = this.state;
    if (state === null) {
      return false;
    }
    const correct = !this.errorArmed;
    this.errorArmed = false;
    this.root.classList.remove("error-armed");
    this.inFlight = true;
    this.render();
    try {
      const response = await send(state.id, correct, newNonce());
      if (response.sentence_complete && response.committed_sentence !== null) {
        this.showToast(
          `sentence committed: ${JSON.stringify(response.committed_sentence)}`,
        );
      }
      this.metricsReport = await this.client.metrics(state.id);
      this.adopt(response);
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        // The server refused the request and changed nothing.
        this.showToast(error.detail);
        return false;
      }
      // Transport failure after retries: the operation may or may not
      // have been applied, so re-synchronize from the server.
      await this.resync(state.id);
      this.showToast("connection lost; state re-synchronized");
      return false;
    } finally {
      this.inFlight = false;
      this.render();
    }
  }

  private async resync(sessionId: string): Promise<void> {
    try {
      const state = await this.client.getState(sessionId);
      this.metricsReport = state.metrics;
      this.adopt(state);
    } catch {
      // Server unreachable; keep the last known state on screen.
    }
  }

  /** Replace the current snapshot and start the cycle for its matrix. */
  private adopt(state: SessionState): void {
    this.state = state;
    this.cursor = clampCursor(this.cursor, state.matrix.rows, state.matrix.cols);
    this.cycle.begin(state.prediction_phase, state.ppd_s);
    this.render();
  }

  private onPhaseChange(): void {
    this.syncFlasher();
    this.render();
  }

  private syncFlasher(): void {
    const state = this.state;
    if (
      state !== null &&
      this.flashing &&
      this.cycle.phase === "identification"
    ) {
      this.flasher.start(
        state.matrix.rows,
        state.matrix.cols,
        this.options.sdS,
        this.options.isiS,
      );
    } else {
      this.flasher.stop();
    }
  }

  private render(): void {
    const state = this.state;
    if (state === null) {
      return;
    }
    const view = buildView(
      state,
      this.cycle.phase,
      this.cycle.countdownS,
      this.metricsReport,
    );
    this.lastView = view;
    const acceptsInput = this.cycle.inputAllowed() && !this.inFlight;
    renderSpelled(this.els.spelled, view);
    renderPhase(this.els.phase, view);
    renderLegend(this.els.legend, view);
    this.els.legendPanel.classList.toggle("hidden", view.phase !== "prediction");
    renderGrid(this.els.grid, view, this.cursor, acceptsInput, (row, col) => {
      void this.selectCell(row, col);
    });
    this.els.grid.classList.toggle("veiled", view.phase === "prediction");
    renderMetrics(this.els.metrics, view);
    this.options.onUpdate?.(view);
  }

  private renderPhaseOnly(): void {
    const state = this.state;
    if (state === null || this.lastView === null) {
      return;
    }
    renderPhase(this.els.phase, {
      ...this.lastView,
      phase: this.cycle.phase,
      countdownS: this.cycle.countdownS,
    });
  }

  private onKeydown(event: KeyboardEvent): void {
    const state = this.state;
    if (state === null) {
      return;
    }
    const { rows, cols } = state.matrix;
    if (event.key.startsWith("Arrow")) {
      this.cursor = moveCursor(this.cursor, event.key, rows, cols);
      applyCursor(this.els.grid, this.cursor);
      event.preventDefault();
    } else if (event.key === "Enter") {
      void this.selectCell(this.cursor.row, this.cursor.col);
      event.preventDefault();
    }
  }

  private showToast(text: string): void {
    this.els.toast.textContent = text;
    this.els.toast.classList.add("show");
    if (this.toastTimer !== null) {
      clearTimeout(this.toastTimer);
    }
    this.toastTimer = setTimeout(() => {
      this.els.toast.classList.remove("show");
      this.toastTimer = null;
    }, this.options.toastMs);
  }
}
