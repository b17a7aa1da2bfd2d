// Patterns View: month rows by hour-of-day columns, cell color from the
// diverging scale anchored at zero, absent cells hatched. In comparison
// mode the per-penetration grids share one color range (the response's
// global min/max), so intensities are directly comparable.

import type { PatternsResponse } from "./api";
import { divergingColor, NEUTRAL, symmetricMax } from "./color";

const MONTH_NAMES = ["", "Jan", "Feb", "Mar", "Apr", "May", "Jun",
  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

export function renderPatterns(container: HTMLElement, response: PatternsResponse): void {
  container.replaceChildren();
  const maxAbs = symmetricMax(response.min_mean_crpss, response.max_mean_crpss);
  const anyPresent = response.grids.some((grid) => grid.cells.some((cell) => cell.n > 0));
  if (!anyPresent) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No skill records match the current filters.";
    container.append(empty);
    return;
  }

  for (const grid of response.grids) {
    const panel = document.createElement("div");
    panel.className = "heatmap-panel";
    panel.dataset.penetration = String(grid.penetration);

    const heading = document.createElement("h3");
    heading.textContent = `${grid.penetration}% penetration`;
    panel.append(heading);

    const table = document.createElement("table");
    table.className = "heatmap";

    const header = document.createElement("tr");
    header.append(document.createElement("th"));
    for (let hour = 0; hour < 24; hour++) {
      const th = document.createElement("th");
      th.textContent = String(hour);
      header.append(th);
    }
    table.append(header);

    const byKey = new Map(grid.cells.map((cell) => [`${cell.month}:${cell.hour}`, cell]));
    for (const month of grid.months) {
      const row = document.createElement("tr");
      const label = document.createElement("th");
      label.textContent = MONTH_NAMES[month] ?? String(month);
      row.append(label);
      for (let hour = 0; hour < 24; hour++) {
        const cell = byKey.get(`${month}:${hour}`);
        const td = document.createElement("td");
        td.className = "cell";
        td.dataset.month = String(month);
        td.dataset.hour = String(hour);
        if (cell === undefined || cell.mean_crpss === null) {
          td.classList.add("absent");
          td.style.backgroundColor = NEUTRAL;
          td.title = `${MONTH_NAMES[month]} ${hour}:00 — no data`;
          td.dataset.n = "0";
        } else {
          td.style.backgroundColor = divergingColor(cell.mean_crpss, maxAbs);
          td.dataset.mean = String(cell.mean_crpss);
          td.dataset.n = String(cell.n);
          td.title =
            `${MONTH_NAMES[month]} ${hour}:00 — mean CRPSS ${cell.mean_crpss.toFixed(4)}, n=${cell.n}`;
        }
        row.append(td);
      }
      table.append(row);
    }
    panel.append(table);
    container.append(panel);
  }
}
