/**
 * DOM rendering for the session view.
 *
 * Render functions are retained-mode-free: each takes a container and a
 * {@link UiSessionView} and rebuilds that region. They use the
 * container's own document (never a global), so they run unchanged in a
 * browser and under a synthetic DOM in tests. Fast-changing decorations
 * (flash highlight, keyboard cursor) are applied by class toggling so
 * they do not force grid rebuilds.
 */

import type { FlashTarget } from "./cycle.js";
import type { UiSessionView } from "./view.js";

/** Keyboard cursor position inside the grid. */
export interface Cursor {
  row: number;
  col: number;
}

/** Clamp a cursor into a rows x cols grid. */
export function clampCursor(cursor: Cursor, rows: number, cols: number): Cursor {
  return {
    row: Math.min(Math.max(cursor.row, 0), Math.max(rows - 1, 0)),
    col: Math.min(Math.max(cursor.col, 0), Math.max(cols - 1, 0)),
  };
}

/** Apply one arrow-key move, staying inside the grid. */
export function moveCursor(
  cursor: Cursor,
  key: string,
  rows: number,
  cols: number,
): Cursor {
  const next = { ...cursor };
  switch (key) {
    case "ArrowUp":
      next.row -= 1;
      break;
    case "ArrowDown":
      next.row += 1;
      break;
    case "ArrowLeft":
      next.col -= 1;
      break;
    case "ArrowRight":
      next.col += 1;
      break;
    default:
      return cursor;
  }
  return clampCursor(next, rows, cols);
}

function doc(el: HTMLElement): Document {
  return el.ownerDocument;
}

/** Rebuild the selection grid as a rows x cols board of cell buttons. */
export function renderGrid(
  gridEl: HTMLElement,
  view: UiSessionView,
  cursor: Cursor,
  enabled: boolean,
  onCellClick: (row: number, col: number) => void,
): void {
  const d = doc(gridEl);
  gridEl.textContent = "";
  gridEl.style.gridTemplateColumns = `repeat(${view.grid.cols}, 1fr)`;
  gridEl.setAttribute("role", "grid");
  gridEl.setAttribute("aria-rowcount", String(view.grid.rows));
  gridEl.setAttribute("aria-colcount", String(view.grid.cols));
  gridEl.classList.toggle("disabled", !enabled);
  for (const cell of view.grid.cells) {
    const button = d.createElement("button");
    button.type = "button";
    button.className = "cell";
    button.dataset.row = String(cell.row);
    button.dataset.col = String(cell.col);
    if (cell.kind === null) {
      button.classList.add("empty");
      button.disabled = true;
    } else {
      button.classList.add(cell.kind);
      button.textContent = cell.label;
      if (cell.detail !== null) {
        button.title = cell.detail;
      }
    }
    if (cell.row === cursor.row && cell.col === cursor.col) {
      button.classList.add("cursor");
    }
    button.addEventListener("click", () => onCellClick(cell.row, cell.col));
    gridEl.appendChild(button);
  }
}

/** Move the keyboard-cursor highlight without rebuilding the grid. */
export function applyCursor(gridEl: HTMLElement, cursor: Cursor): void {
  for (const el of Array.from(gridEl.querySelectorAll(".cell"))) {
    const button = el as HTMLElement;
    const here =
      button.dataset.row === String(cursor.row) &&
      button.dataset.col === String(cursor.col);
    button.classList.toggle("cursor", here);
  }
}

/** Highlight the flashed row/column (or clear, for `null`). */
export function applyFlash(gridEl: HTMLElement, target: FlashTarget): void {
  for (const el of Array.from(gridEl.querySelectorAll(".cell"))) {
    const button = el as HTMLElement;
    const lit =
      target !== null &&
      (target.axis === "row"
        ? button.dataset.row === String(target.index)
        : button.dataset.col === String(target.index));
    button.classList.toggle("flash", lit);
  }
}

/** Render the id-to-word prediction legend. */
export function renderLegend(legendEl: HTMLElement, view: UiSessionView): void {
  const d = doc(legendEl);
  legendEl.textContent = "";
  for (const entry of view.legend) {
    const item = d.createElement("div");
    item.className = "legend-entry";
    item.dataset.predictionId = String(entry.id);
    const label = d.createElement("span");
    label.className = "legend-id";
    label.textContent = entry.label;
    const word = d.createElement("span");
    word.className = "legend-word";
    word.textContent = entry.word;
    item.append(label, word);
    legendEl.appendChild(item);
  }
}

/** Render the spelled transcript with the current sentence highlighted. */
export function renderSpelled(spelledEl: HTMLElement, view: UiSessionView): void {
  const d = doc(spelledEl);
  spelledEl.textContent = "";
  const before = d.createElement("span");
  before.className = "spelled-before";
  before.textContent = view.spelledBefore;
  const current = d.createElement("span");
  current.className = "spelled-ssp";
  current.textContent = view.ssp;
  const caret = d.createElement("span");
  caret.className = "caret";
  spelledEl.append(before, current, caret);
}

/** Render the phase indicator and (during predictions) the countdown. */
export function renderPhase(phaseEl: HTMLElement, view: UiSessionView): void {
  const d = doc(phaseEl);
  phaseEl.textContent = "";
  phaseEl.dataset.phase = view.phase;
  const name = d.createElement("span");
  name.className = "phase-name";
  name.textContent =
    view.phase === "prediction" ? "prediction phase" : "identification phase";
  phaseEl.appendChild(name);
  if (view.countdownS !== null) {
    const countdown = d.createElement("span");
    countdown.className = "phase-countdown";
    countdown.textContent = `${view.countdownS.toFixed(1)} s`;
    phaseEl.appendChild(countdown);
  }
}

/** Render the throughput panel (dashes until the first selection). */
export function renderMetrics(metricsEl: HTMLElement, view: UiSessionView): void {
  const d = doc(metricsEl);
  const m = view.metrics;
  const rows: [string, string][] = [
    ["selections", m === null ? "–" : String(m.selections)],
    ["characters", m === null ? "–" : String(m.characters)],
    ["ocm-model", m === null ? "–" : m.ocmModel.toFixed(2)],
    ["ocm-wall", m === null ? "–" : m.ocmWall.toFixed(2)],
    ["ac", m === null ? "–" : m.ac.toFixed(3)],
    ["ec", m === null ? "–" : m.ec.toFixed(3)],
  ];
  metricsEl.textContent = "";
  for (const [key, value] of rows) {
    const item = d.createElement("div");
    item.className = "metric";
    const label = d.createElement("span");
    label.className = "metric-name";
    label.textContent = key;
    const val = d.createElement("span");
    val.className = "metric-value";
    val.dataset.metric = key;
    val.textContent = value;
    item.append(label, val);
    metricsEl.appendChild(item);
  }
}
