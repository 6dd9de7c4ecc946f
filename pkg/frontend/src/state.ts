/** Client-side view state. Everything analytical lives server-side; this is
 * only visibility and interaction state. */

import type { SortKey } from "./types.js";

export type DetailLevel = "median" | "histogram" | "points";

export interface HoverArrow {
  kind: "arrow";
  feature: number;
  key: string; // "from->to"
  cohort: "A" | "B";
}

export interface HoverBin {
  kind: "bin";
  feature: number;
  bin: number;
  cohort: "A" | "B";
}

export interface HoverPoint {
  kind: "point";
  feature: number;
  bin: number;
  cohort: "A" | "B";
  rowId: number;
}

export type HoverTarget = HoverArrow | HoverBin | HoverPoint;

export interface ViewState {
  detailLevels: Set<DetailLevel>;
  sortKey: SortKey;
  detailsOn: boolean; // textual range labels
  hover: HoverTarget | null;
  hiddenA: boolean;
  hiddenB: boolean;
}

export function defaultViewState(): ViewState {
  // median + histogram on by default; points off
  return {
    detailLevels: new Set(["median", "histogram"]),
    sortKey: "median_difference",
    detailsOn: false,
    hover: null,
    hiddenA: false,
    hiddenB: false,
  };
}

/** Toggle a detail level, refusing to switch the last active one off. */
export function toggleDetail(state: ViewState, level: DetailLevel): boolean {
  if (state.detailLevels.has(level)) {
    if (state.detailLevels.size === 1) {
      return false; // at least one detail level stays active
    }
    state.detailLevels.delete(level);
  } else {
    state.detailLevels.add(level);
  }
  return true;
}
