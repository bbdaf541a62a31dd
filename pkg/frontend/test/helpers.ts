import { FitResult } from "../src/types.js";

export function fakeFit(location: number, scale = 0.1, df = 3): FitResult {
  return {
    schema_version: 1,
    prior: { family: "t", location, scale, df, truncation: "none" },
    loss: 1e-6,
    percentile_feedback: { p33: location - 0.04, p50: location, p66: location + 0.04 },
    converged: true,
    df_at_bound: false,
  };
}

/** Manually driven scheduler standing in for setTimeout in tests. */
export class ManualClock {
  private tasks: Array<{ fn: () => void; at: number; id: number }> = [];
  private now = 0;
  private nextId = 1;

  schedule = (fn: () => void, ms: number): unknown => {
    const id = this.nextId++;
    this.tasks.push({ fn, at: this.now + ms, id });
    return id;
  };

  cancel = (handle: unknown): void => {
    this.tasks = this.tasks.filter((t) => t.id !== handle);
  };

  advance(ms: number): void {
    this.now += ms;
    const due = this.tasks.filter((t) => t.at <= this.now);
    this.tasks = this.tasks.filter((t) => t.at > this.now);
    for (const task of due) {
      task.fn();
    }
  }

  get pendingCount(): number {
    return this.tasks.length;
  }
}

/** Fit transport whose responses resolve only when the test says so. */
export class ManualApi {
  calls: Array<{
    binEdges: number[];
    chipCounts: number[];
    df: number | null;
    resolve: (fit: FitResult) => void;
    reject: (err: unknown) => void;
  }> = [];

  fitRoulette(
    binEdges: number[],
    chipCounts: number[],
    df: number | null,
  ): Promise<FitResult> {
    return new Promise((resolve, reject) => {
      this.calls.push({
        binEdges: binEdges.slice(),
        chipCounts: chipCounts.slice(),
        df,
        resolve,
        reject,
      });
    });
  }
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setImmediate(resolve));
}
