import type { BBox, Layer, RankingParams } from "./types.js";

export interface ViewState {
  center: [number, number]; // [lat, lon]
  zoom: number;
  // Explicit area of interest drawn on the map; null = current viewport.
  selectedBBox: BBox | null;
  timeFrom: number;
  timeTo: number;
  showNative: boolean;
  showCime: boolean;
  ranking: RankingParams | null; // mirror of the server's live params
  selectedPostId: number | null;
}

/** Layer toggles map onto the API layer parameter; both off means "do not
 * fetch at all" (null). */
export function layerParam(state: Pick<ViewState, "showNative" | "showCime">): Layer | null {
  if (state.showNative && state.showCime) return "all";
  if (state.showNative) return "native";
  if (state.showCime) return "cime";
  return null;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): ((...args: A) => void) & { cancel: () => void; flush: () => void } {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;
  const debounced = (...args: A) => {
    pending = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const args2 = pending;
      pending = null;
      if (args2) fn(...args2);
    }, waitMs);
  };
  debounced.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    pending = null;
  };
  debounced.flush = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
      const args = pending;
      pending = null;
      if (args) fn(...args);
    }
  };
  return debounced;
}
