import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Flasher, PhaseCycle } from "../src/cycle.js";
import type { FlashTarget } from "../src/cycle.js";

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

function tracking(): { cycle: PhaseCycle; events: string[] } {
  const events: string[] = [];
  const cycle = new PhaseCycle({
    onPhase: (phase) => events.push(`phase:${phase}`),
    onCountdown: (left) => events.push(`countdown:${left.toFixed(1)}`),
  });
  return { cycle, events };
}

describe("prediction-then-identification cycle", () => {
  it("keeps input locked for the whole prediction display", () => {
    const { cycle } = tracking();
    cycle.begin(true, 10);
    expect(cycle.phase).toBe("prediction");
    expect(cycle.inputAllowed()).toBe(false);
    vi.advanceTimersByTime(9999);
    expect(cycle.inputAllowed()).toBe(false);
    expect(cycle.countdownS).toBeGreaterThan(0);
    vi.advanceTimersByTime(1);
    expect(cycle.inputAllowed()).toBe(true);
    expect(cycle.phase).toBe("identification");
  });

  it("counts down to zero before input unlocks", () => {
    const { cycle, events } = tracking();
    cycle.begin(true, 0.5);
    vi.advanceTimersByTime(500);
    const zeroAt = events.indexOf("countdown:0.0");
    const unlockAt = events.indexOf("phase:identification");
    expect(zeroAt).toBeGreaterThanOrEqual(0);
    expect(unlockAt).toBeGreaterThan(zeroAt);
  });

  it("reports a monotonically non-increasing countdown", () => {
    const events: number[] = [];
    const cycle = new PhaseCycle({ onCountdown: (left) => events.push(left) });
    cycle.begin(true, 1);
    vi.advanceTimersByTime(1000);
    expect(events[0]).toBe(1);
    expect(events[events.length - 1]).toBe(0);
    for (let i = 1; i < events.length; i += 1) {
      expect(events[i]!).toBeLessThanOrEqual(events[i - 1]!);
    }
  });

  it("skips the prediction phase when the matrix has no predictions", () => {
    const { cycle, events } = tracking();
    cycle.begin(false, 10);
    expect(cycle.phase).toBe("identification");
    expect(cycle.inputAllowed()).toBe(true);
    expect(events).toEqual(["phase:identification"]);
  });

  it("skips the prediction phase for a zero display duration", () => {
    const { cycle } = tracking();
    cycle.begin(true, 0);
    expect(cycle.inputAllowed()).toBe(true);
  });

  it("emits nothing after cancel", () => {
    const { cycle, events } = tracking();
    cycle.begin(true, 5);
    events.length = 0;
    cycle.cancel();
    vi.advanceTimersByTime(10_000);
    expect(events).toEqual([]);
  });

  it("restarts the display when a new matrix arrives mid-countdown", () => {
    const { cycle } = tracking();
    cycle.begin(true, 10);
    vi.advanceTimersByTime(5000);
    cycle.begin(true, 10); // fresh server response, fresh display
    vi.advanceTimersByTime(5000); // 10 s after the first begin
    expect(cycle.inputAllowed()).toBe(false);
    vi.advanceTimersByTime(5000);
    expect(cycle.inputAllowed()).toBe(true);
  });
});

describe("cosmetic row/column flasher", () => {
  function flashes(): { flasher: Flasher; seen: (string | null)[] } {
    const seen: (string | null)[] = [];
    const flasher = new Flasher((target: FlashTarget) => {
      seen.push(target === null ? null : `${target.axis}${target.index}`);
    });
    return { flasher, seen };
  }

  it("lights rows then columns with stimulus/gap timing", () => {
    const { flasher, seen } = flashes();
    flasher.start(2, 3, 0.125, 0.075);
    expect(seen).toEqual(["row0"]); // lit immediately
    vi.advanceTimersByTime(125);
    expect(seen).toEqual(["row0", null]); // gap after the stimulus
    vi.advanceTimersByTime(75);
    expect(seen).toEqual(["row0", null, "row1"]);
    // run through the remaining row and the three columns
    vi.advanceTimersByTime(4 * 200);
    expect(seen.filter((s) => s !== null)).toEqual([
      "row0",
      "row1",
      "col0",
      "col1",
      "col2",
      "row0", // wrapped around
    ]);
  });

  it("honors the configured stimulus duration before the gap", () => {
    const { flasher, seen } = flashes();
    flasher.start(1, 1, 0.25, 0.1);
    vi.advanceTimersByTime(249);
    expect(seen).toEqual(["row0"]);
    vi.advanceTimersByTime(1);
    expect(seen).toEqual(["row0", null]);
  });

  it("clears the highlight and stops cleanly", () => {
    const { flasher, seen } = flashes();
    flasher.start(2, 2, 0.125, 0.125);
    vi.advanceTimersByTime(300);
    flasher.stop();
    expect(seen[seen.length - 1]).toBeNull();
    const length = seen.length;
    vi.advanceTimersByTime(2000);
    expect(seen).toHaveLength(length);
    expect(flasher.active).toBe(false);
  });
});
