/** Roulette sheet state and its pure transitions.
 *
 * Chips live on a fixed grid of equally sized bins; any edit invalidates
 * the fitted overlay until the next fit response arrives, and a response
 * only applies if it carries the newest request nonce (stale responses
 * are dropped, never rendered).
 */

import { FitResult } from "./types.js";

export interface RouletteState {
  binEdges: number[];
  chipCounts: number[];
  fitted: FitResult | null;
  dirty: boolean;
  /** nonce of the fit response currently displayed, -1 when none */
  fittedNonce: number;
}

export const DEFAULT_RANGE: [number, number] = [-0.5, 1.5];
export const DEFAULT_BINS = 20;

export function makeState(
  lo: number = DEFAULT_RANGE[0],
  hi: number = DEFAULT_RANGE[1],
  bins: number = DEFAULT_BINS,
): RouletteState {
  if (!(lo < hi) || bins < 1) {
    throw new Error(`bad roulette range [${lo}, ${hi}] with ${bins} bins`);
  }
  const binEdges = Array.from(
    { length: bins + 1 },
    (_, i) => lo + ((hi - lo) * i) / bins,
  );
  return {
    binEdges,
    chipCounts: new Array(bins).fill(0),
    fitted: null,
    dirty: false,
    fittedNonce: -1,
  };
}

export function totalChips(state: RouletteState): number {
  return state.chipCounts.reduce((a, b) => a + b, 0);
}

export function nonEmptyBins(state: RouletteState): number {
  return state.chipCounts.filter((c) => c > 0).length;
}

/** Add (delta = +1) or remove (delta = -1) one chip. Removing from an
 * empty bin returns the same state object so the caller can show a cue
 * without scheduling anything. */
export function placeOrRemoveChip(
  state: RouletteState,
  binIndex: number,
  delta: 1 | -1,
): RouletteState {
  if (binIndex < 0 || binIndex >= state.chipCounts.length) {
    return state;
  }
  const next = state.chipCounts[binIndex] + delta;
  if (next < 0) {
    return state;
  }
  const chipCounts = state.chipCounts.slice();
  chipCounts[binIndex] = next;
  return {
    ...state,
    chipCounts,
    fitted: null, // stale until the next fit response
    dirty: true,
  };
}

/** Replace the grid (range or bin count); all chips are discarded. */
export function resetGrid(lo: number, hi: number, bins: number): RouletteState {
  return makeState(lo, hi, bins);
}

/** Apply a fit response; ignored unless it is newer than what is shown. */
export function applyFitResponse(
  state: RouletteState,
  fit: FitResult,
  nonce: number,
): RouletteState {
  if (nonce <= state.fittedNonce) {
    return state;
  }
  return { ...state, fitted: fit, dirty: false, fittedNonce: nonce };
}
