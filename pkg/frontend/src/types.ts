/** Wire types for the workbench HTTP API. The client computes no statistics
 * itself; every rendered number traces back to one of these payloads. */

export type CohortName = "A" | "B";
export type FeatureKind = "continuous" | "categorical";
export type SortKey = "median_difference" | "counterfactual_count" | "schema_order";

export interface FeatureInfo {
  name: string;
  kind: FeatureKind;
  categories?: string[];
  display_unit?: string;
}

export interface ContinuousBinning {
  kind: "continuous";
  mean: number;
  std: number;
  inner_edges: number[];
}

export interface CategoryCoding {
  kind: "categorical";
  categories: string[];
}

export type FeatureScheme = ContinuousBinning | CategoryCoding;

export interface SchemaPayload {
  fingerprint: string;
  schema: {
    label_column: string;
    positive_label: string;
    negative_label: string;
    features: FeatureInfo[];
  };
  scheme: { bin_count: number; features: FeatureScheme[] };
  bin_count: number;
  threshold: number;
  rows: number;
}

export interface ContinuousSummary {
  kind: "continuous";
  median: number | null;
  median_bin: number | null;
  histogram: number[] | null;
}

export interface CategoricalSummary {
  kind: "categorical";
  mode: string | null;
  counts: number[];
}

export type FeatureSummary = ContinuousSummary | CategoricalSummary;

export interface CohortSummaryPayload {
  size: number;
  features: FeatureSummary[];
}

export interface FilterRangeJson {
  feature: number;
  low?: number;
  high?: number;
  categories?: string[];
}

export interface FilterSetJson {
  confidence?: [number, number];
  cells?: string[];
  ranges?: FilterRangeJson[];
  hidden?: boolean;
}

export interface FilterPayload {
  fingerprint: string;
  cohort: CohortName;
  filter: FilterSetJson;
  row_ids: number[];
  summary: CohortSummaryPayload;
}

export interface ComparePayload {
  fingerprint: string;
  sort: SortKey;
  order: number[];
  a: CohortSummaryPayload;
  b: CohortSummaryPayload;
}

export interface TransitionCellJson {
  count: number;
  ids: number[];
}

/** feature name -> "from->to" -> cell */
export type TransitionMapJson = Record<string, Record<string, TransitionCellJson>>;

export interface AggregatePayload {
  fingerprint: string;
  cohort: CohortName;
  positive_origin: TransitionMapJson;
  negative_origin: TransitionMapJson;
  failed_ids: number[];
  unexplained: { failed: number; missing: number };
}

export interface ChangeJson {
  feature: number;
  from_bin?: number;
  to_bin?: number;
  from_value?: number;
  to_value?: number;
  from_category?: string;
  to_category?: string;
}

export interface ExplanationPayload {
  fingerprint: string;
  row_id: number;
  success: boolean;
  stop_reason: string | null;
  original_prob: number;
  original_decision: number;
  final_prob: number;
  changes: ChangeJson[];
  trace: Array<ChangeJson & { step: number; improvement: number; prob_after: number }>;
}

export interface SlicePayload {
  fingerprint: string;
  cohort: CohortName;
  feature: number;
  bin: number;
  rows: Array<{ row_id: number; values: Array<number | string> }>;
}
