/**
 * Pure view-model construction.
 *
 * {@link buildView} turns the last server response (plus the client-side
 * phase state) into everything the DOM layer renders. It never invents
 * matrix content: grid dimensions, cell labels, legend entries and
 * spelled text are taken verbatim from the server snapshot, and
 * {@link checkStateConsistency} rejects snapshots that contradict
 * themselves so a rendering bug can never show a matrix the server did
 * not send.
 */

import type { Phase } from "./cycle.js";
import type { CellKind, MetricsReport, SessionState } from "./wire.js";
import { predictionCells } from "./wire.js";

/** A server state snapshot that violates its own invariants. */
export class ViewError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ViewError";
  }
}

export interface LegendEntry {
  id: number;
  /** Matrix cell label for this prediction (e.g. `0'`). */
  label: string;
  word: string;
}

export interface UiCell {
  row: number;
  col: number;
  /** null for padding cells. */
  kind: CellKind | null;
  label: string;
  /** Tooltip detail (what a prediction cell would spell). */
  detail: string | null;
}

export interface UiMetrics {
  selections: number;
  characters: number;
  ocmModel: number;
  ocmWall: number;
  ac: number;
  ec: number;
}

/** Everything the DOM layer needs to draw one moment of a session. */
export interface UiSessionView {
  sessionId: string;
  kb: string;
  /** Transcript before the current sentence (rendered dimmed). */
  spelledBefore: string;
  /** Current-sentence suffix (rendered highlighted). */
  ssp: string;
  phase: Phase;
  /** Remaining prediction-display seconds, null outside that phase. */
  countdownS: number | null;
  legend: LegendEntry[];
  grid: { rows: number; cols: number; cells: UiCell[] };
  metrics: UiMetrics | null;
}

/**
 * Validate a server snapshot against its own structural invariants:
 * the cell list fills exactly rows x cols, the legend lists exactly the
 * matrix's prediction ids, and the current-sentence suffix is a suffix
 * of the spelled text.
 */
export function checkStateConsistency(state: SessionState): void {
  const { matrix, legend } = state;
  if (matrix.cells.length !== matrix.rows * matrix.cols) {
    throw new ViewError(
      `matrix reports ${matrix.rows}x${matrix.cols} but carries ` +
        `${matrix.cells.length} cells`,
    );
  }
  const matrixIds = predictionCells(matrix)
    .map((cell) => cell.prediction_id)
    .filter((id): id is number => id !== null)
    .sort((a, b) => a - b);
  const legendIds = Object.keys(legend)
    .map(Number)
    .sort((a, b) => a - b);
  if (JSON.stringify(matrixIds) !== JSON.stringify(legendIds)) {
    throw new ViewError(
      `legend ids [${legendIds}] do not match matrix prediction ids ` +
        `[${matrixIds}]`,
    );
  }
  if (!state.spelled.endsWith(state.ssp)) {
    throw new ViewError(
      `current sentence ${JSON.stringify(state.ssp)} is not a suffix of ` +
        `spelled text ${JSON.stringify(state.spelled)}`,
    );
  }
}

/** Legend entries sorted by prediction id. */
export function legendEntries(state: SessionState): LegendEntry[] {
  return Object.entries(state.legend)
    .map(([id, word]) => ({ id: Number(id), label: `${id}'`, word }))
    .sort((a, b) => a.id - b.id);
}

function toUiMetrics(report: MetricsReport): UiMetrics {
  return {
    selections: report.selections,
    characters: report.characters,
    ocmModel: report.ocm_model,
    ocmWall: report.ocm_wall,
    ac: report.ac,
    ec: report.ec,
  };
}

export function buildView(
  state: SessionState,
  phase: Phase,
  countdownS: number | null,
  metrics: MetricsReport | null,
): UiSessionView {
  checkStateConsistency(state);
  const { matrix } = state;
  const cells: UiCell[] = matrix.cells.map((cell, index) => {
    const row = Math.floor(index / matrix.cols);
    const col = index % matrix.cols;
    if (cell === null) {
      return { row, col, kind: null, label: "", detail: null };
    }
    const detail =
      cell.kind === "prediction" && cell.word !== null
        ? `${cell.word} (spells "${cell.spell ?? ""}")`
        : null;
    return { row, col, kind: cell.kind, label: cell.label, detail };
  });
  return {
    sessionId: state.id,
    kb: state.kb,
    spelledBefore: state.spelled.slice(0, state.spelled.length - state.ssp.length),
    ssp: state.ssp,
    phase,
    countdownS,
    legend: legendEntries(state),
    grid: { rows: matrix.rows, cols: matrix.cols, cells },
    metrics: metrics === null ? null : toUiMetrics(metrics),
  };
}
