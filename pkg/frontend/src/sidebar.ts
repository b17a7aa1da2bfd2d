// Sidebar: penetration level filter, comparison-mode toggle, resolution
// for the Patterns View, start/end dates, and month toggles. Every change
// emits a full UiState; invalid date ranges are blocked before any fetch.

import type { MetaResponse } from "./api";
import { comparisonMode, validDateRange, type ResolutionChoice, type UiState } from "./state";

const MONTH_SHORT = ["J", "F", "M", "A", "M", "J", "J", "A", "S", "O", "N", "D"];

export function renderSidebar(
  container: HTMLElement,
  meta: MetaResponse,
  state: UiState,
  onChange: (next: UiState) => void,
): void {
  container.replaceChildren();

  const form = document.createElement("form");
  form.className = "sidebar-form";
  form.addEventListener("submit", (event) => event.preventDefault());

  // comparison mode toggle (on <=> penetration === "all")
  const modeLabel = document.createElement("label");
  modeLabel.className = "control";
  const modeBox = document.createElement("input");
  modeBox.type = "checkbox";
  modeBox.id = "comparison-mode";
  modeBox.checked = comparisonMode(state);
  modeLabel.append(modeBox, document.createTextNode(" compare all penetration levels"));

  // penetration select
  const penLabel = document.createElement("label");
  penLabel.className = "control";
  penLabel.textContent = "solar penetration ";
  const penSelect = document.createElement("select");
  penSelect.id = "penetration";
  for (const level of meta.penetrations) {
    const option = document.createElement("option");
    option.value = String(level);
    option.textContent = `${level}%`;
    penSelect.append(option);
  }
  penSelect.value = state.penetration === "all" ? String(meta.penetrations[0]) : String(state.penetration);
  penSelect.disabled = comparisonMode(state);
  penLabel.append(penSelect);

  // resolution select (drives the Patterns View)
  const resLabel = document.createElement("label");
  resLabel.className = "control";
  resLabel.textContent = "heatmap resolution ";
  const resSelect = document.createElement("select");
  resSelect.id = "resolution";
  for (const res of meta.resolutions) {
    const option = document.createElement("option");
    option.value = res;
    option.textContent = res;
    resSelect.append(option);
  }
  resSelect.value = state.resolution;
  resLabel.append(resSelect);

  // date range
  const startLabel = document.createElement("label");
  startLabel.className = "control";
  startLabel.textContent = "start ";
  const startInput = document.createElement("input");
  startInput.type = "date";
  startInput.id = "start-date";
  if (meta.date_span) {
    startInput.min = meta.date_span.start;
    startInput.max = meta.date_span.end;
  }
  startInput.value = state.start ?? "";
  startLabel.append(startInput);

  const endLabel = document.createElement("label");
  endLabel.className = "control";
  endLabel.textContent = "end ";
  const endInput = document.createElement("input");
  endInput.type = "date";
  endInput.id = "end-date";
  if (meta.date_span) {
    endInput.min = meta.date_span.start;
    endInput.max = meta.date_span.end;
  }
  endInput.value = state.end ?? "";
  endLabel.append(endInput);

  const rangeError = document.createElement("p");
  rangeError.className = "range-error";
  rangeError.id = "range-error";
  rangeError.hidden = true;
  rangeError.textContent = "start date must not be after end date";

  // month toggles for the heatmap
  const monthsWrap = document.createElement("div");
  monthsWrap.className = "months control";
  monthsWrap.append(document.createTextNode("months "));
  const monthBoxes: HTMLInputElement[] = [];
  for (let month = 1; month <= 12; month++) {
    const label = document.createElement("label");
    label.className = "month-toggle";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = String(month);
    box.checked = state.months === null || state.months.includes(month);
    monthBoxes.push(box);
    label.append(box, document.createTextNode(MONTH_SHORT[month - 1]));
    monthsWrap.append(label);
  }

  const readState = (): UiState => {
    const months = monthBoxes.filter((box) => box.checked).map((box) => Number(box.value));
    return {
      penetration: modeBox.checked ? "all" : (Number(penSelect.value) as 20 | 30 | 50),
      resolution: resSelect.value as ResolutionChoice,
      start: startInput.value || null,
      end: endInput.value || null,
      months: months.length === 12 || months.length === 0 ? null : months,
    };
  };

  const emit = () => {
    const next = readState();
    penSelect.disabled = modeBox.checked;
    if (!validDateRange(next)) {
      rangeError.hidden = false;
      return; // block the fetch client-side
    }
    rangeError.hidden = true;
    onChange(next);
  };

  for (const control of [modeBox, penSelect, resSelect, startInput, endInput, ...monthBoxes]) {
    control.addEventListener("change", emit);
  }

  form.append(modeLabel, penLabel, resLabel, startLabel, endLabel, rangeError, monthsWrap);
  container.append(form);
}
