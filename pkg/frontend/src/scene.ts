/** Pure scene construction: server payloads + view state in, a drawable
 * description out. No DOM, no fetching, no client-side statistics. */

import type {
  AggregatePayload,
  CategoryCoding,
  CohortName,
  ComparePayload,
  ContinuousBinning,
  FeatureSummary,
  FilterPayload,
  SchemaPayload,
  TransitionMapJson,
} from "./types.js";
import type { ViewState } from "./state.js";

export const MAX_LEGIBLE_FEATURES = 30;
export const MAX_ARROW_STROKES = 5;

export class FingerprintMismatch extends Error {
  constructor(expected: string, got: string) {
    super(`stale payload: expected fingerprint ${expected}, got ${got}`);
    this.name = "FingerprintMismatch";
  }
}

export interface BarScene {
  bin: number;
  count: number;
  fraction: number;
  rangeLabel: string;
}

export interface ArrowScene {
  key: string;
  from: number; // bin index or category ordinal
  to: number;
  fromLabel: string;
  toLabel: string;
  count: number;
  ids: number[];
  origin: "positive" | "negative";
  color: "red" | "green";
  opacity: number;
  strokes: number;
  tooltip: string;
}

export interface SubColumnScene {
  cohort: CohortName;
  empty: boolean;
  hidden: boolean;
  size: number;
  medianTick: { bin: number; value: number } | null;
  modeLabel: string | null;
  bars: BarScene[];
  arrows: ArrowScene[];
}

export interface ColumnScene {
  feature: number;
  name: string;
  kind: "continuous" | "categorical";
  sub: { a: SubColumnScene; b: SubColumnScene };
}

export interface Scene {
  fingerprint: string;
  columns: ColumnScene[];
  unexplained: { a: AggregatePayload["unexplained"]; b: AggregatePayload["unexplained"] };
  warnings: string[];
}

function formatNumber(x: number): string {
  const rounded = Math.round(x * 100) / 100;
  return String(rounded);
}

/** Value range of one histogram bin, from the shared binning scheme. */
export function binRangeLabel(
  binning: ContinuousBinning,
  binCount: number,
  bin: number,
): string {
  const edges = binning.inner_edges;
  if (bin === 0) {
    return `< ${formatNumber(edges[0])}`;
  }
  if (bin === binCount - 1) {
    return `>= ${formatNumber(edges[edges.length - 1])}`;
  }
  return `${formatNumber(edges[bin - 1])} - ${formatNumber(edges[bin])}`;
}

function checkFingerprint(expected: string, got: string): void {
  if (expected !== got) {
    throw new FingerprintMismatch(expected, got);
  }
}

function arrowsFor(
  featureName: string,
  partition: TransitionMapJson,
  origin: "positive" | "negative",
  toOrdinal: (label: string) => number,
  maxCount: number,
): ArrowScene[] {
  const cells = partition[featureName];
  if (!cells) {
    return [];
  }
  const arrows: ArrowScene[] = [];
  for (const [key, cell] of Object.entries(cells)) {
    const [fromLabel, toLabel] = key.split("->");
    arrows.push({
      key,
      from: toOrdinal(fromLabel),
      to: toOrdinal(toLabel),
      fromLabel,
      toLabel,
      count: cell.count,
      ids: cell.ids,
      origin,
      // positive-origin changes push the decision negative: red; and green
      // marks the path from a negative prediction to a positive one
      color: origin === "positive" ? "red" : "green",
      opacity: 0.25 + 0.75 * (maxCount > 0 ? cell.count / maxCount : 0),
      strokes: Math.min(cell.count, MAX_ARROW_STROKES),
      tooltip: `${featureName} ${fromLabel} -> ${toLabel}: count ${cell.count}`,
    });
  }
  arrows.sort((x, y) => (x.key < y.key ? -1 : x.key > y.key ? 1 : 0));
  return arrows;
}

function maxTransitionCount(aggregates: AggregatePayload[]): number {
  let max = 0;
  for (const aggregate of aggregates) {
    for (const partition of [aggregate.positive_origin, aggregate.negative_origin]) {
      for (const cells of Object.values(partition)) {
        for (const cell of Object.values(cells)) {
          max = Math.max(max, cell.count);
        }
      }
    }
  }
  return max;
}

function subColumn(
  cohort: CohortName,
  summary: FeatureSummary,
  size: number,
  hidden: boolean,
  schema: SchemaPayload,
  feature: number,
  aggregate: AggregatePayload,
  view: ViewState,
  maxCount: number,
): SubColumnScene {
  const info = schema.schema.features[feature];
  const bars: BarScene[] = [];
  let medianTick: SubColumnScene["medianTick"] = null;
  let modeLabel: string | null = null;

  if (summary.kind === "continuous") {
    if (view.detailLevels.has("histogram") && summary.histogram) {
      const binning = schema.scheme.features[feature] as ContinuousBinning;
      summary.histogram.forEach((count, bin) => {
        bars.push({
          bin,
          count,
          fraction: size > 0 ? count / size : 0,
          rangeLabel: binRangeLabel(binning, schema.bin_count, bin),
        });
      });
    }
    if (
      view.detailLevels.has("median") &&
      summary.median !== null &&
      summary.median_bin !== null
    ) {
      medianTick = { bin: summary.median_bin, value: summary.median };
    }
  } else {
    if (view.detailLevels.has("histogram")) {
      const coding = schema.scheme.features[feature] as CategoryCoding;
      summary.counts.forEach((count, ordinal) => {
        bars.push({
          bin: ordinal,
          count,
          fraction: size > 0 ? count / size : 0,
          rangeLabel: coding.categories[ordinal],
        });
      });
    }
    if (view.detailLevels.has("median")) {
      modeLabel = summary.mode;
    }
  }

  const toOrdinal = (label: string): number => {
    if (info.kind === "continuous") {
      return Number(label);
    }
    return (info.categories ?? []).indexOf(label);
  };
  const arrows = [
    ...arrowsFor(info.name, aggregate.positive_origin, "positive", toOrdinal, maxCount),
    ...arrowsFor(info.name, aggregate.negative_origin, "negative", toOrdinal, maxCount),
  ];

  return {
    cohort,
    empty: size === 0,
    hidden,
    size,
    medianTick,
    modeLabel,
    bars,
    arrows,
  };
}

/** Assemble the comparison scene. All payloads must share one fingerprint. */
export function buildScene(
  schema: SchemaPayload,
  filterA: FilterPayload,
  filterB: FilterPayload,
  compare: ComparePayload,
  aggregateA: AggregatePayload,
  aggregateB: AggregatePayload,
  view: ViewState,
): Scene {
  for (const payload of [filterA, filterB, compare, aggregateA, aggregateB]) {
    checkFingerprint(schema.fingerprint, payload.fingerprint);
  }

  const warnings: string[] = [];
  if (schema.schema.features.length > MAX_LEGIBLE_FEATURES) {
    warnings.push(
      `${schema.schema.features.length} features exceed the ${MAX_LEGIBLE_FEATURES}-column ` +
        "legibility budget; sort and read the leading columns",
    );
  }

  const maxCount = maxTransitionCount([aggregateA, aggregateB]);
  const columns: ColumnScene[] = compare.order.map((feature) => {
    const info = schema.schema.features[feature];
    return {
      feature,
      name: info.name,
      kind: info.kind,
      sub: {
        a: subColumn(
          "A", compare.a.features[feature], compare.a.size, view.hiddenA,
          schema, feature, aggregateA, view, maxCount,
        ),
        b: subColumn(
          "B", compare.b.features[feature], compare.b.size, view.hiddenB,
          schema, feature, aggregateB, view, maxCount,
        ),
      },
    };
  });

  return {
    fingerprint: schema.fingerprint,
    columns,
    unexplained: { a: aggregateA.unexplained, b: aggregateB.unexplained },
    warnings,
  };
}
