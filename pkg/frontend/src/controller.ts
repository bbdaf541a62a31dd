/** Session controller: debounced live fitting and the analysis panel.
 *
 * One fit and one analysis may be in flight at a time. Every fit request
 * gets a fresh nonce; a response renders only if no newer request has
 * been issued since, so overlays can never go backwards while the user
 * keeps placing chips.
 */

import { ApiClient } from "./api.js";
import {
  RouletteState,
  applyFitResponse,
  makeState,
  nonEmptyBins,
  placeOrRemoveChip,
  resetGrid,
  totalChips,
} from "./state.js";
import { AnalysisReport, AnalyzeRequest, PriorDto } from "./types.js";

export const FIT_DEBOUNCE_MS = 250;
export const MIN_NONEMPTY_BINS = 3;

export const DEFAULT_PRIOR: PriorDto = {
  family: "t",
  location: 0,
  scale: 0.7071067811865476,
  df: 1,
  truncation: "none",
};

type Scheduler = (fn: () => void, ms: number) => unknown;
type Canceller = (handle: unknown) => void;

export interface ControllerEvents {
  onState?: (state: RouletteState) => void;
  onFitPending?: () => void;
  onFitSkipped?: (reason: string) => void;
  onFitError?: (message: string) => void;
  onNoop?: (binIndex: number) => void;
}

export class ElicitationController {
  state: RouletteState;
  /** fixed df for the fit; null lets the service fit it freely */
  fitDf: number | null = 3;

  /** bumped on every sheet edit; a fit response renders only if the
   * sheet has not moved since its request was built */
  private version = 0;
  private inFlight = false;
  private queued = false;
  private debounceHandle: unknown = null;

  constructor(
    private readonly api: ApiClient,
    private readonly events: ControllerEvents = {},
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Canceller = (h) => clearTimeout(h as number),
    private readonly debounceMs: number = FIT_DEBOUNCE_MS,
  ) {
    this.state = makeState();
  }

  /** Current sheet version, the nonce attached to fit requests. */
  get currentNonce(): number {
    return this.version;
  }

  private emitState(): void {
    this.events.onState?.(this.state);
  }

  editChip(binIndex: number, delta: 1 | -1): void {
    const next = placeOrRemoveChip(this.state, binIndex, delta);
    if (next === this.state) {
      this.events.onNoop?.(binIndex);
      return;
    }
    this.version += 1; // any in-flight response is stale from here on
    this.state = next;
    this.emitState();
    this.scheduleFit();
  }

  setGrid(lo: number, hi: number, bins: number): void {
    if (this.debounceHandle !== null) {
      this.cancel(this.debounceHandle);
      this.debounceHandle = null;
    }
    this.version += 1;
    this.state = resetGrid(lo, hi, bins);
    this.emitState();
  }

  setFitDf(df: number | null): void {
    this.fitDf = df;
    this.version += 1; // refits under the new df; old responses are stale
    if (totalChips(this.state) > 0) {
      this.scheduleFit();
    }
  }

  /** Debounce: the request goes out a quarter second after the last edit. */
  private scheduleFit(): void {
    if (this.debounceHandle !== null) {
      this.cancel(this.debounceHandle);
    }
    this.debounceHandle = this.schedule(() => {
      this.debounceHandle = null;
      void this.sendFit();
    }, this.debounceMs);
  }

  private async sendFit(): Promise<void> {
    if (nonEmptyBins(this.state) < MIN_NONEMPTY_BINS) {
      this.events.onFitSkipped?.(
        `need chips in at least ${MIN_NONEMPTY_BINS} bins`,
      );
      return;
    }
    if (this.inFlight) {
      this.queued = true;
      return;
    }
    const requestNonce = this.version;
    this.inFlight = true;
    this.events.onFitPending?.();
    try {
      const fit = await this.api.fitRoulette(
        this.state.binEdges,
        this.state.chipCounts,
        this.fitDf,
      );
      if (requestNonce === this.version) {
        this.state = applyFitResponse(this.state, fit, requestNonce);
        this.emitState();
      }
      // otherwise: the sheet changed while the request was in flight;
      // the response is stale and never renders
    } catch (err) {
      if (requestNonce === this.version) {
        this.events.onFitError?.(err instanceof Error ? err.message : String(err));
      }
    } finally {
      this.inFlight = false;
      if (this.queued) {
        this.queued = false;
        void this.sendFit();
      }
    }
  }
}

export interface AnalysisInputs {
  t: number;
  n1: number;
  n2?: number;
  side: "two" | "pos" | "neg";
  useElicitedPrior: boolean;
  compareDefault?: boolean;
}

export class AnalysisController {
  private inFlight = false;
  private nonce = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly getElicitedPrior: () => PriorDto | null,
    private readonly onReport: (report: AnalysisReport) => void,
    private readonly onError: (message: string) => void,
  ) {}

  buildRequest(inputs: AnalysisInputs): AnalyzeRequest {
    let prior = DEFAULT_PRIOR;
    if (inputs.useElicitedPrior) {
      const elicited = this.getElicitedPrior();
      if (elicited === null) {
        throw new Error("no fitted prior available yet; place chips first");
      }
      prior = { ...elicited, truncation: "none" };
    }
    const request: AnalyzeRequest = {
      design: inputs.n2 == null ? "one" : "two",
      t: inputs.t,
      n1: inputs.n1,
      prior,
      compare_default: Boolean(inputs.compareDefault),
      grid: true,
    };
    if (inputs.n2 != null) {
      request.n2 = inputs.n2;
    }
    if (inputs.side !== "two") {
      request.direction = inputs.side;
    }
    return request;
  }

  async run(inputs: AnalysisInputs): Promise<void> {
    if (this.inFlight) {
      return; // a single analysis at a time
    }
    let request: AnalyzeRequest;
    try {
      request = this.buildRequest(inputs);
    } catch (err) {
      this.onError(err instanceof Error ? err.message : String(err));
      return;
    }
    const requestNonce = ++this.nonce;
    this.inFlight = true;
    try {
      const report = await this.api.analyze(request);
      if (requestNonce === this.nonce) {
        this.onReport(report);
      }
    } catch (err) {
      if (requestNonce === this.nonce) {
        this.onError(err instanceof Error ? err.message : String(err));
      }
    } finally {
      this.inFlight = false;
    }
  }
}
