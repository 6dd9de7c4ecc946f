/** Browser bootstrap: fetch, build, render, and wire interactions. */

import { ApiClient, FingerprintGate, PanelUpdater } from "./api.js";
import {
  explanationHighlight,
  highlightedColumns,
  hoverBinLabel,
  singleArrowHighlight,
  type CoHighlight,
} from "./hover.js";
import { buildScene, FingerprintMismatch, type Scene } from "./scene.js";
import { defaultViewState, toggleDetail, type DetailLevel } from "./state.js";
import { renderScene } from "./render.js";
import type {
  AggregatePayload,
  ComparePayload,
  FilterPayload,
  SchemaPayload,
  SortKey,
} from "./types.js";

interface Payloads {
  schema: SchemaPayload;
  filterA: FilterPayload;
  filterB: FilterPayload;
  compare: ComparePayload;
  aggregateA: AggregatePayload;
  aggregateB: AggregatePayload;
}

const view = defaultViewState();
let payloads: Payloads | null = null;
let scene: Scene | null = null;
let highlight: CoHighlight | null = null;

const api = new ApiClient("");
let gate: FingerprintGate | null = null;
let sessionId = "";

async function fetchAll(): Promise<Payloads> {
  const schema = await api.schema(sessionId);
  const [filterA, filterB, compare, aggregateA, aggregateB] = await Promise.all([
    api.filter(sessionId, "A"),
    api.filter(sessionId, "B"),
    api.compare(sessionId, view.sortKey),
    api.aggregate(sessionId, "A"),
    api.aggregate(sessionId, "B"),
  ]);
  return { schema, filterA, filterB, compare, aggregateA, aggregateB };
}

async function refresh(): Promise<void> {
  payloads = await fetchAll();
  gate = new FingerprintGate(payloads.schema.fingerprint, refresh);
  redraw();
}

function redraw(): void {
  if (!payloads) {
    return;
  }
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  try {
    scene = buildScene(
      payloads.schema,
      payloads.filterA,
      payloads.filterB,
      payloads.compare,
      payloads.aggregateA,
      payloads.aggregateB,
      view,
    );
  } catch (error) {
    if (error instanceof FingerprintMismatch) {
      setStatus("stale data detected; refetching");
      void refresh();
      return;
    }
    throw error;
  }
  root.innerHTML = renderScene(scene, view, highlight);
  const banner = document.getElementById("warnings");
  if (banner) {
    banner.textContent = scene.warnings.join(" / ");
  }
  attachHandlers(root);
}

function setStatus(text: string): void {
  const node = document.getElementById("status");
  if (node) {
    node.textContent = text;
  }
}

function attachHandlers(root: HTMLElement): void {
  for (const arrow of root.querySelectorAll<SVGGElement>("g.arrow")) {
    arrow.addEventListener("mouseenter", () => {
      const feature = Number(arrow.dataset.feature);
      const key = arrow.dataset.key ?? "";
      const ids = (arrow.dataset.ids ?? "").split(",").filter(Boolean).map(Number);
      if (ids.length === 0) {
        highlight = singleArrowHighlight(feature, key);
        redraw();
        return;
      }
      api
        .explanation(sessionId, ids[0])
        .then((detail) => {
          if (gate && !gate.admit(detail)) {
            return;
          }
          highlight = explanationHighlight(detail);
          if (scene) {
            setStatus(
              `row ${detail.row_id}: ${detail.changes.length} changes across columns ` +
                highlightedColumns(scene, highlight).join(", "),
            );
          }
          redraw();
        })
        .catch(() => {
          highlight = singleArrowHighlight(feature, key);
          redraw();
        });
    });
    arrow.addEventListener("mouseleave", () => {
      highlight = null;
      redraw();
    });
  }
  for (const bar of root.querySelectorAll<SVGRectElement>("rect.bar")) {
    bar.addEventListener("mouseenter", () => {
      if (!payloads) {
        return;
      }
      const feature = Number(bar.dataset.feature);
      const bin = Number(bar.dataset.bin);
      const cohort = (bar.dataset.cohort ?? "A") as "A" | "B";
      setStatus(hoverBinLabel(payloads.schema, { kind: "bin", feature, bin, cohort }));
    });
    if (view.detailLevels.has("points")) {
      bar.addEventListener("click", () => {
        const feature = Number(bar.dataset.feature);
        const bin = Number(bar.dataset.bin);
        const cohort = (bar.dataset.cohort ?? "A") as "A" | "B";
        void api.slice(sessionId, cohort, feature, bin).then((slice) => {
          if (gate && !gate.admit(slice)) {
            return;
          }
          setStatus(
            `parallel coordinates: ${slice.rows.length} rows in bin ${bin} ` +
              `(rows ${slice.rows.slice(0, 8).map((r) => r.row_id).join(", ")}...)`,
          );
        });
      });
    }
  }
}

function wireControls(): void {
  const sort = document.getElementById("sort") as HTMLSelectElement | null;
  sort?.addEventListener("change", () => {
    view.sortKey = sort.value as SortKey;
    void api.compare(sessionId, view.sortKey).then((compare) => {
      if (payloads && gate && gate.admit(compare)) {
        payloads.compare = compare;
        redraw();
      }
    });
  });
  for (const level of ["median", "histogram", "points"] as DetailLevel[]) {
    const box = document.getElementById(`detail-${level}`) as HTMLInputElement | null;
    box?.addEventListener("change", () => {
      if (!toggleDetail(view, level)) {
        box.checked = true; // at least one level stays active
      }
      redraw();
    });
  }
  const details = document.getElementById("details-toggle") as HTMLInputElement | null;
  details?.addEventListener("change", () => {
    view.detailsOn = details.checked;
    redraw();
  });
  for (const which of ["A", "B"] as const) {
    const hide = document.getElementById(`hide-${which}`) as HTMLInputElement | null;
    hide?.addEventListener("change", () => {
      if (which === "A") {
        view.hiddenA = hide.checked;
      } else {
        view.hiddenB = hide.checked;
      }
      redraw();
    });
    const confidence = document.getElementById(
      `confidence-${which}`,
    ) as HTMLInputElement | null;
    const updater = new PanelUpdater(
      (fs) => api.putFilter(sessionId, which, fs),
      (payload) => {
        if (payloads && gate && gate.admit(payload)) {
          if (which === "A") {
            payloads.filterA = payload;
          } else {
            payloads.filterB = payload;
          }
          void api.aggregate(sessionId, which).then((aggregate) => {
            if (payloads && gate && gate.admit(aggregate)) {
              if (which === "A") {
                payloads.aggregateA = aggregate;
              } else {
                payloads.aggregateB = aggregate;
              }
              redraw();
            }
          });
        }
      },
    );
    confidence?.addEventListener("input", () => {
      const low = Number(confidence.value);
      updater.submit({ confidence: [low, 1.0], cells: [] });
    });
  }
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  sessionId = params.get("session") ?? "";
  if (!sessionId) {
    setStatus("add ?session=<id> to the URL (create one via POST /sessions)");
    return;
  }
  wireControls();
  await refresh();
}

void start();
