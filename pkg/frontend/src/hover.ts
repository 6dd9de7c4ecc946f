/** Hover interactions: joining one arrow back to its whole explanation, bin
 * range readouts, and the parallel-coordinates slice request for points. */

import type { Scene } from "./scene.js";
import type {
  ChangeJson,
  ContinuousBinning,
  ExplanationPayload,
  SchemaPayload,
} from "./types.js";
import { binRangeLabel } from "./scene.js";
import type { HoverBin, HoverPoint } from "./state.js";

export interface HighlightedArrow {
  feature: number;
  key: string; // "from->to"
}

export interface CoHighlight {
  rowId: number;
  arrows: HighlightedArrow[];
}

function changeKey(change: ChangeJson): string {
  if (change.from_category !== undefined) {
    return `${change.from_category}->${change.to_category}`;
  }
  return `${change.from_bin}->${change.to_bin}`;
}

/** All arrows belonging to one explanation, one per changed feature, so a
 * single hovered arrow lights up the complete counterfactual across columns. */
export function explanationHighlight(detail: ExplanationPayload): CoHighlight {
  return {
    rowId: detail.row_id,
    arrows: detail.changes.map((change) => ({
      feature: change.feature,
      key: changeKey(change),
    })),
  };
}

/** Columns containing at least one highlighted arrow. */
export function highlightedColumns(scene: Scene, highlight: CoHighlight): number[] {
  const wanted = new Map<number, Set<string>>();
  for (const arrow of highlight.arrows) {
    let keys = wanted.get(arrow.feature);
    if (!keys) {
      keys = new Set();
      wanted.set(arrow.feature, keys);
    }
    keys.add(arrow.key);
  }
  const columns: number[] = [];
  for (const column of scene.columns) {
    const keys = wanted.get(column.feature);
    if (!keys) {
      continue;
    }
    const present = [...column.sub.a.arrows, ...column.sub.b.arrows].some((arrow) =>
      keys.has(arrow.key),
    );
    if (present) {
      columns.push(column.feature);
    }
  }
  return columns;
}

/** Degraded fallback when the detail fetch fails: highlight the arrow alone. */
export function singleArrowHighlight(feature: number, key: string): CoHighlight {
  return { rowId: -1, arrows: [{ feature, key }] };
}

/** Hovering a histogram bin reveals the value range it covers. */
export function hoverBinLabel(schema: SchemaPayload, target: HoverBin): string {
  const entry = schema.scheme.features[target.feature];
  if (entry.kind === "categorical") {
    return entry.categories[target.bin];
  }
  return binRangeLabel(entry as ContinuousBinning, schema.bin_count, target.bin);
}

export interface SliceRequest {
  cohort: "A" | "B";
  feature: number;
  bin: number;
}

/** Clicking a point opens parallel coordinates for everything in its bin. */
export function pointSliceRequest(target: HoverPoint): SliceRequest {
  return { cohort: target.cohort, feature: target.feature, bin: target.bin };
}
