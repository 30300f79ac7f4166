/**
 * Client-side working cycle of one selection.
 *
 * Every server response starts a new cycle. When the response's matrix is
 * preceded by a prediction display, the cycle opens in the *prediction*
 * phase: the id-to-word legend is shown for the session's prediction
 * display duration while a countdown runs and all input is ignored. The
 * countdown reaches zero first; only then does the cycle enter the
 * *identification* phase, where the matrix accepts selections.
 *
 * Row/column flashing during the identification phase is purely cosmetic
 * (selection is manual), so it lives in a separate {@link Flasher} that
 * can be switched off; its on/off durations honor the session's stimulus
 * and inter-stimulus timing.
 */

export type Phase = "prediction" | "identification";

/** Countdown display refresh period (purely visual granularity). */
const TICK_MS = 100;

export interface CycleCallbacks {
  /** Called on every phase change, after the state is updated. */
  onPhase?: (phase: Phase) => void;
  /** Called with the remaining prediction-display seconds (last call: 0). */
  onCountdown?: (secondsLeft: number) => void;
}

/** Prediction-then-identification phase machine for the current matrix. */
export class PhaseCycle {
  private currentPhase: Phase = "identification";
  private remainingS: number | null = null;
  private endTimer: ReturnType<typeof setTimeout> | null = null;
  private tickTimer: ReturnType<typeof setInterval> | null = null;
  private readonly callbacks: CycleCallbacks;

  constructor(callbacks: CycleCallbacks = {}) {
    this.callbacks = callbacks;
  }

  get phase(): Phase {
    return this.currentPhase;
  }

  /** Remaining prediction seconds, or null outside the prediction phase. */
  get countdownS(): number | null {
    return this.remainingS;
  }

  /** Selections are only accepted during the identification phase. */
  inputAllowed(): boolean {
    return this.currentPhase === "identification";
  }

  /**
   * Start the cycle for a freshly received matrix. With `predictionPhase`
   * the legend is displayed for `ppdS` seconds before input unlocks;
   * without it the cycle goes straight to identification.
   */
  begin(predictionPhase: boolean, ppdS: number): void {
    this.cancel();
    if (!predictionPhase || ppdS <= 0) {
      this.enterIdentification();
      return;
    }
    this.currentPhase = "prediction";
    this.remainingS = ppdS;
    this.callbacks.onPhase?.("prediction");
    this.callbacks.onCountdown?.(ppdS);
    const startedAt = Date.now();
    this.tickTimer = setInterval(() => {
      const left = Math.max(0, ppdS - (Date.now() - startedAt) / 1000);
      this.remainingS = left;
      this.callbacks.onCountdown?.(left);
    }, TICK_MS);
    this.endTimer = setTimeout(() => {
      // Zero is reported before the phase flips: the countdown visibly
      // finishes before the matrix starts accepting input.
      this.remainingS = 0;
      this.callbacks.onCountdown?.(0);
      this.enterIdentification();
    }, ppdS * 1000);
  }

  /** Stop all timers without emitting anything (teardown / restart). */
  cancel(): void {
    if (this.endTimer !== null) {
      clearTimeout(this.endTimer);
      this.endTimer = null;
    }
    if (this.tickTimer !== null) {
      clearInterval(this.tickTimer);
      this.tickTimer = null;
    }
  }

  private enterIdentification(): void {
    this.cancel();
    this.currentPhase = "identification";
    this.remainingS = null;
    this.callbacks.onPhase?.("identification");
  }
}

/** What the flasher currently highlights (null between flashes). */
export type FlashTarget = { axis: "row" | "col"; index: number } | null;

/**
 * Cosmetic row/column highlighter: lights each row, then each column, for
 * the stimulus duration with the inter-stimulus gap in between, looping
 * until stopped.
 */
export class Flasher {
  private readonly onFlash: (target: FlashTarget) => void;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private running = false;

  constructor(onFlash: (target: FlashTarget) => void) {
    this.onFlash = onFlash;
  }

  get active(): boolean {
    return this.running;
  }

  start(rows: number, cols: number, sdS: number, isiS: number): void {
    this.stop();
    const targets: FlashTarget[] = [];
    for (let r = 0; r < rows; r += 1) {
      targets.push({ axis: "row", index: r });
    }
    for (let c = 0; c < cols; c += 1) {
      targets.push({ axis: "col", index: c });
    }
    if (targets.length === 0 || sdS <= 0) {
      return;
    }
    this.running = true;
    const step = (i: number): void => {
      this.onFlash(targets[i % targets.length] ?? null);
      this.timer = setTimeout(() => {
        this.onFlash(null);
        this.timer = setTimeout(() => step(i + 1), isiS * 1000);
      }, sdS * 1000);
    };
    step(0);
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.running) {
      this.running = false;
      this.onFlash(null);
    }
  }
}
