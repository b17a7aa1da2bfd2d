// Comparison View: one modified box plot per (penetration, resolution)
// group, CRPSS on the y-axis, resolutions along the x-axis, grouped by
// penetration in comparison mode. Per-date dots are jittered alongside
// each box; every number shown is lifted verbatim from the API payload.

import type { ComparisonGroup, ComparisonResponse } from "./api";
import { jitterOffsets } from "./jitter";

const SVG_NS = "http://www.w3.org/2000/svg";

const PLOT_HEIGHT = 340;
const SLOT_WIDTH = 150;
const MARGIN = { top: 16, right: 12, bottom: 34, left: 56 };

function svgEl<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, String(value));
  return node;
}

function extent(groups: ComparisonGroup[]): [number, number] {
  let lo = 0;
  let hi = 0;
  for (const group of groups) {
    for (const point of group.points) {
      lo = Math.min(lo, point.crpss);
      hi = Math.max(hi, point.crpss);
    }
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.06;
  return [lo - pad, hi + pad];
}

export function renderComparison(container: HTMLElement, response: ComparisonResponse): void {
  container.replaceChildren();
  const groups = response.groups;
  if (groups.length === 0 || groups.every((g) => g.n === 0)) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No scored dates in the selected range.";
    container.append(empty);
    return;
  }

  const [yMin, yMax] = extent(groups);
  const innerHeight = PLOT_HEIGHT - MARGIN.top - MARGIN.bottom;
  const y = (value: number) =>
    MARGIN.top + innerHeight * (1 - (value - yMin) / (yMax - yMin));

  const width = MARGIN.left + SLOT_WIDTH * groups.length + MARGIN.right;
  const svg = svgEl("svg", {
    width,
    height: PLOT_HEIGHT,
    viewBox: `0 0 ${width} ${PLOT_HEIGHT}`,
    class: "comparison-plot",
    role: "img",
  });

  // y axis with a handful of ticks
  const axis = svgEl("g", { class: "axis" });
  const tickCount = 6;
  for (let i = 0; i <= tickCount; i++) {
    const value = yMin + ((yMax - yMin) * i) / tickCount;
    const ty = y(value);
    axis.append(svgEl("line", { x1: MARGIN.left - 4, x2: width - MARGIN.right, y1: ty, y2: ty, class: "gridline" }));
    const label = svgEl("text", { x: MARGIN.left - 8, y: ty + 4, "text-anchor": "end", class: "tick-label" });
    label.textContent = value.toFixed(2);
    axis.append(label);
  }
  svg.append(axis);

  // zero skill line
  if (yMin < 0 && yMax > 0) {
    svg.append(svgEl("line", {
      x1: MARGIN.left - 4, x2: width - MARGIN.right,
      y1: y(0), y2: y(0),
      class: "zero-line",
      "data-role": "zero-line",
    }));
  }

  groups.forEach((group, index) => {
    const cx = MARGIN.left + SLOT_WIDTH * index + SLOT_WIDTH / 2;
    const cell = svgEl("g", {
      class: "group",
      "data-penetration": group.penetration,
      "data-resolution": group.resolution,
      "data-n": group.n,
    });

    const title = svgEl("text", { x: cx, y: PLOT_HEIGHT - 12, "text-anchor": "middle", class: "group-label" });
    title.textContent = `${group.resolution} @ ${group.penetration}%`;
    cell.append(title);

    if (group.box === null) {
      const note = svgEl("text", { x: cx, y: PLOT_HEIGHT / 2, "text-anchor": "middle", class: "empty-state" });
      note.textContent = "no data";
      cell.append(note);
      svg.append(cell);
      return;
    }

    const box = group.box;
    const halfBox = 26;

    cell.append(svgEl("line", { x1: cx, x2: cx, y1: y(box.whisker_lo), y2: y(box.q1), class: "whisker" }));
    cell.append(svgEl("line", { x1: cx, x2: cx, y1: y(box.q3), y2: y(box.whisker_hi), class: "whisker" }));
    cell.append(svgEl("line", { x1: cx - 12, x2: cx + 12, y1: y(box.whisker_lo), y2: y(box.whisker_lo), class: "whisker-cap" }));
    cell.append(svgEl("line", { x1: cx - 12, x2: cx + 12, y1: y(box.whisker_hi), y2: y(box.whisker_hi), class: "whisker-cap" }));
    cell.append(svgEl("rect", {
      x: cx - halfBox,
      y: y(box.q3),
      width: halfBox * 2,
      height: Math.max(1, y(box.q1) - y(box.q3)),
      class: "box",
    }));
    cell.append(svgEl("line", {
      x1: cx - halfBox, x2: cx + halfBox,
      y1: y(box.median), y2: y(box.median),
      class: "median-line",
      "data-role": "median",
      "data-median": box.median,
    }));

    for (const outlier of box.outliers) {
      const mark = svgEl("circle", { cx, cy: y(outlier), r: 3, class: "outlier" });
      const tip = svgEl("title");
      tip.textContent = `outlier crpss ${outlier}`;
      mark.append(tip);
      cell.append(mark);
    }

    const offsets = jitterOffsets(
      group.points.length,
      `${group.penetration}|${group.resolution}|${group.model_id}`,
    );
    group.points.forEach((point, i) => {
      const dot = svgEl("circle", {
        cx: cx + halfBox + 14 + offsets[i] * 11,
        cy: y(point.crpss),
        r: 2,
        class: "dot",
        "data-date": point.date,
        "data-crpss": point.crpss,
      });
      const tip = svgEl("title");
      tip.textContent = `${point.date}: crpss ${point.crpss.toFixed(4)}`;
      dot.append(tip);
      cell.append(dot);
    });

    svg.append(cell);
  });

  container.append(svg);
}
