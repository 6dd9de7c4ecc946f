/** SVG rendering of a scene. Pure string assembly so it is testable without a
 * DOM; main.ts injects the result and attaches listeners by data attributes. */

import type { ArrowScene, Scene, SubColumnScene } from "./scene.js";
import type { CoHighlight } from "./hover.js";
import type { ViewState } from "./state.js";

export const COLUMN_WIDTH = 120;
export const SUB_WIDTH = 52;
export const COLUMN_HEIGHT = 260;
export const HEADER_HEIGHT = 34;

const ARROW_COLORS = { red: "#c0392b", green: "#1e8449" } as const;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function barRects(
  sub: SubColumnScene,
  x: number,
  feature: number,
  detailsOn: boolean,
): string {
  if (sub.bars.length === 0) {
    return "";
  }
  const slot = COLUMN_HEIGHT / sub.bars.length;
  const parts: string[] = [];
  for (const bar of sub.bars) {
    const width = Math.max(1, bar.fraction * (SUB_WIDTH - 6));
    const y = HEADER_HEIGHT + bar.bin * slot;
    parts.push(
      `<rect class="bar" data-feature="${feature}" data-cohort="${sub.cohort}" ` +
        `data-bin="${bar.bin}" x="${x}" y="${y.toFixed(1)}" width="${width.toFixed(1)}" ` +
        `height="${Math.max(1, slot - 2).toFixed(1)}" fill="#7f8fa6">` +
        `<title>${esc(bar.rangeLabel)}: ${bar.count}</title></rect>`,
    );
    if (detailsOn) {
      parts.push(
        `<text class="range-label" x="${x}" y="${(y + slot / 2).toFixed(1)}" ` +
          `font-size="6">${esc(bar.rangeLabel)}</text>`,
      );
    }
  }
  return parts.join("");
}

function medianTick(sub: SubColumnScene, x: number): string {
  if (!sub.medianTick) {
    return "";
  }
  const slot = COLUMN_HEIGHT / Math.max(sub.bars.length, 1);
  const y = HEADER_HEIGHT + (sub.medianTick.bin + 0.5) * slot;
  return (
    `<line class="median" x1="${x}" x2="${x + SUB_WIDTH - 6}" ` +
    `y1="${y.toFixed(1)}" y2="${y.toFixed(1)}" stroke="#2c3e50" stroke-width="2">` +
    `<title>median ${sub.medianTick.value}</title></line>`
  );
}

function arrowPaths(
  sub: SubColumnScene,
  x: number,
  feature: number,
  bins: number,
  highlight: CoHighlight | null,
): string {
  const slot = COLUMN_HEIGHT / Math.max(bins, 1);
  const parts: string[] = [];
  for (const arrow of sub.arrows) {
    const y1 = HEADER_HEIGHT + (arrow.from + 0.5) * slot;
    const y2 = HEADER_HEIGHT + (arrow.to + 0.5) * slot;
    const lit =
      highlight !== null &&
      highlight.arrows.some((h) => h.feature === feature && h.key === arrow.key);
    parts.push(arrowGlyph(arrow, x, y1, y2, feature, sub.cohort, lit));
  }
  return parts.join("");
}

function arrowGlyph(
  arrow: ArrowScene,
  x: number,
  y1: number,
  y2: number,
  feature: number,
  cohort: string,
  lit: boolean,
): string {
  const cx = x + SUB_WIDTH * 0.75;
  const strokes: string[] = [];
  for (let i = 0; i < arrow.strokes; i += 1) {
    const jitter = (i - (arrow.strokes - 1) / 2) * 1.6; // fan the repeats out
    strokes.push(
      `<path d="M ${(x + 4).toFixed(1)} ${y1.toFixed(1)} Q ${(cx + jitter).toFixed(1)} ` +
        `${((y1 + y2) / 2).toFixed(1)} ${(x + 4).toFixed(1)} ${y2.toFixed(1)}" ` +
        `fill="none" stroke="${ARROW_COLORS[arrow.color]}" stroke-width="1.4"/>`,
    );
  }
  const classes = lit ? "arrow highlighted" : "arrow";
  return (
    `<g class="${classes}" data-feature="${feature}" data-cohort="${cohort}" ` +
    `data-key="${esc(arrow.key)}" data-ids="${arrow.ids.join(",")}" ` +
    `opacity="${arrow.opacity.toFixed(3)}">` +
    `<title>${esc(arrow.tooltip)}</title>${strokes.join("")}</g>`
  );
}

function subColumnSvg(
  sub: SubColumnScene,
  x: number,
  feature: number,
  bins: number,
  view: ViewState,
  highlight: CoHighlight | null,
): string {
  if (sub.hidden) {
    return "";
  }
  if (sub.empty) {
    return (
      `<text class="empty" x="${x}" y="${HEADER_HEIGHT + 20}" font-size="8">` +
      "no matching points</text>"
    );
  }
  const parts = [barRects(sub, x, feature, view.detailsOn), medianTick(sub, x)];
  if (sub.modeLabel) {
    parts.push(
      `<text class="mode" x="${x}" y="${HEADER_HEIGHT - 4}" font-size="7">` +
        `${esc(sub.modeLabel)}</text>`,
    );
  }
  parts.push(arrowPaths(sub, x, feature, bins, highlight));
  return parts.join("");
}

export function renderScene(
  scene: Scene,
  view: ViewState,
  highlight: CoHighlight | null = null,
): string {
  const width = scene.columns.length * COLUMN_WIDTH;
  const height = HEADER_HEIGHT + COLUMN_HEIGHT + 30;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">`,
  ];
  scene.columns.forEach((column, i) => {
    const x0 = i * COLUMN_WIDTH;
    const bins = Math.max(column.sub.a.bars.length, column.sub.b.bars.length, 1);
    parts.push(
      `<g class="column" data-feature="${column.feature}">` +
        `<text class="feature-name" x="${x0 + 4}" y="14" font-size="9">` +
        `${esc(column.name)}</text>`,
    );
    parts.push(subColumnSvg(column.sub.a, x0 + 4, column.feature, bins, view, highlight));
    parts.push(
      subColumnSvg(column.sub.b, x0 + SUB_WIDTH + 12, column.feature, bins, view, highlight),
    );
    parts.push("</g>");
  });
  parts.push(
    `<text class="unexplained" x="4" y="${height - 8}" font-size="8">` +
      `unexplained A: ${scene.unexplained.a.failed + scene.unexplained.a.missing} ` +
      `B: ${scene.unexplained.b.failed + scene.unexplained.b.missing}</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}
