import { readFileSync } from "node:fs";

import type {
  AggregatePayload,
  ComparePayload,
  ExplanationPayload,
  FilterPayload,
  SchemaPayload,
  SlicePayload,
} from "../src/types.js";

function load<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export const schema = (): SchemaPayload => load("schema.json");
export const filterA = (): FilterPayload => load("filter_a.json");
export const filterB = (): FilterPayload => load("filter_b.json");
export const compare = (): ComparePayload => load("compare.json");
export const aggregateA = (): AggregatePayload => load("aggregate_a.json");
export const aggregateB = (): AggregatePayload => load("aggregate_b.json");
export const explanation3 = (): ExplanationPayload => load("explanation_3change.json");
export const slice = (): SlicePayload => load("slice.json");
