/** Session state and the latest-wins bookkeeping.
 *
 * Requests carry a monotonically increasing sequence number taken at the
 * moment the user acts, not when the request goes on the wire. A response
 * is applied only if its number still matches the newest issued one, so
 * after any burst of slider changes the displayed metrics are exactly the
 * final value's response and stale answers are dropped on the floor.
 */

import type { AnalyzeResponse } from "./api.js";

export type ViewMode = "original" | "overlay" | "markers";

export interface Params {
  binThreshold: number;
  markerThreshold: number;
  cardWidthMm: number;
  cardHeightMm: number;
}

export const DEFAULT_PARAMS: Params = {
  binThreshold: 0.35,
  markerThreshold: 0.17,
  cardWidthMm: 76,
  cardHeightMm: 26,
};

export interface SessionState {
  file: { blob: Blob; name: string } | null;
  originalUrl: string | null;
  params: Params;
  view: ViewMode;
  response: AnalyzeResponse | null;
  requestSeq: number;
  appliedSeq: number;
  busy: boolean;
  error: string | null;
}

export function createState(): SessionState {
  return {
    file: null,
    originalUrl: null,
    params: { ...DEFAULT_PARAMS },
    view: "overlay",
    response: null,
    requestSeq: 0,
    appliedSeq: 0,
    busy: false,
    error: null,
  };
}

/** Threshold widgets are hard-limited to [0, 1]; anything else is a bug
 * upstream, so out-of-range input is clamped rather than rejected. */
export function clampUnit(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function beginRequest(state: SessionState): number {
  state.requestSeq += 1;
  state.busy = true;
  return state.requestSeq;
}

export function applyResponse(
  state: SessionState,
  seq: number,
  response: AnalyzeResponse,
): boolean {
  if (seq !== state.requestSeq) return false; // superseded while in flight
  state.response = response;
  state.appliedSeq = seq;
  state.busy = false;
  state.error = null;
  return true;
}

export function applyError(state: SessionState, seq: number, message: string): boolean {
  if (seq !== state.requestSeq) return false;
  state.busy = false;
  state.error = message;
  return true;
}
