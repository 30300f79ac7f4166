/**
 * Wire types for the spelling-service JSON contract.
 *
 * These mirror the server payloads verbatim (snake_case field names
 * included): the server is the single source of truth for matrix
 * layout, legend contents and spelled text, and the UI never derives
 * any of them locally.
 */

/** Cell kinds as reported by the server. */
export type CellKind = "character" | "mandatory" | "prediction";

/** Selection-record kinds: cell kinds plus the undo outcome. */
export type RecordKind = CellKind | "undo";

/** Label of the undo cell in the mandatory symbol set. */
export const UNDO_LABEL = "undo";

/** One occupied matrix cell; `null` entries in a matrix are padding. */
export interface Cell {
  kind: CellKind;
  label: string;
  prediction_id: number | null;
  word: string | null;
  spell: string | null;
}

/** Row-major matrix snapshot (`cells.length === rows * cols`). */
export interface Matrix {
  rows: number;
  cols: number;
  cells: (Cell | null)[];
}

/** Session state snapshot returned by every session endpoint. */
export interface SessionState {
  id: string;
  kb: string;
  spelled: string;
  ssp: string;
  swp: string;
  matrix: Matrix;
  /** Prediction id (as string) to predicted word. */
  legend: Record<string, string>;
  /** Whether the current matrix is preceded by a prediction display. */
  prediction_phase: boolean;
  /** Prediction-display duration in seconds. */
  ppd_s: number;
  selections: number;
  committed: string[];
}

/** Log entry for one applied selection. */
export interface SelectionRecord {
  step: number;
  kind: RecordKind;
  label: string;
  delta: string;
  correct: boolean;
  t_model_s: number;
}

/** Response to a selection or undo: the new state plus what happened. */
export interface SelectionResponse extends SessionState {
  record: SelectionRecord;
  delta: string;
  sentence_complete: boolean;
  committed_sentence: string | null;
}

/** Throughput metrics in both the model clock and the wall clock. */
export interface MetricsReport {
  selections: number;
  characters: number;
  total_intensifications: number;
  isr: number;
  ac: number;
  ec: number;
  t_model_s: number;
  sm_model: number;
  ocm_model: number;
  t_wall_s: number;
  sm_wall: number;
  ocm_wall: number;
}

/** Upload statistics for a newly ingested knowledge base. */
export interface KbStats {
  name: string;
  sentences: number;
  distinct_words: number;
  mean_word_chars: number;
  discarded: number;
}

/** One row of the knowledge-base listing. */
export interface KbInfo {
  name: string;
  sentences: number;
  distinct_words: number;
}

/** Options accepted when opening a session (server defaults apply). */
export interface SessionOptions {
  kb: string;
  predictions?: boolean;
  p_sharp?: number;
  learn?: boolean;
  nrs?: number;
  sd_s?: number;
  isi_s?: number;
  pre_s?: number;
  post_s?: number;
  ppd_s?: number;
}

/** Extract the prediction cells of a matrix in display order. */
export function predictionCells(matrix: Matrix): Cell[] {
  return matrix.cells.filter(
    (cell): cell is Cell => cell !== null && cell.kind === "prediction",
  );
}

/** Cell at (row, col), or null for padding/out-of-range positions. */
export function cellAt(matrix: Matrix, row: number, col: number): Cell | null {
  if (row < 0 || row >= matrix.rows || col < 0 || col >= matrix.cols) {
    return null;
  }
  return matrix.cells[row * matrix.cols + col] ?? null;
}
