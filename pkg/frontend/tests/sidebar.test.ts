import { describe, expect, it, vi } from "vitest";

import type { MetaResponse } from "../src/api";
import { renderSidebar } from "../src/sidebar";
import { DEFAULT_STATE, type UiState } from "../src/state";
import meta from "./fixtures/meta.json";

const metaDoc = meta as unknown as MetaResponse;

function mount(state: UiState) {
  const container = document.createElement("div");
  const onChange = vi.fn();
  renderSidebar(container, metaDoc, state, onChange);
  return { container, onChange };
}

function change(node: Element) {
  node.dispatchEvent(new Event("change", { bubbles: true }));
}

describe("sidebar", () => {
  it("toggling comparison mode emits penetration=all", () => {
    const { container, onChange } = mount(DEFAULT_STATE);
    const toggle = container.querySelector("#comparison-mode") as HTMLInputElement;
    toggle.checked = true;
    change(toggle);
    expect(onChange).toHaveBeenCalledTimes(1);
    const next = onChange.mock.calls[0][0] as UiState;
    expect(next.penetration).toBe("all");
  });

  it("disables the single-penetration select while in comparison mode", () => {
    const { container } = mount({ ...DEFAULT_STATE, penetration: "all" });
    const select = container.querySelector("#penetration") as HTMLSelectElement;
    expect(select.disabled).toBe(true);
  });

  it("selecting months emits the chosen subset", () => {
    const { container, onChange } = mount(DEFAULT_STATE);
    const boxes = [...container.querySelectorAll(".month-toggle input")] as HTMLInputElement[];
    for (const box of boxes) box.checked = ["4", "5", "6", "7", "8", "9"].includes(box.value);
    change(boxes[0]);
    const next = onChange.mock.calls[0][0] as UiState;
    expect(next.months).toEqual([4, 5, 6, 7, 8, 9]);
  });

  it("an inverted date range is blocked before any fetch", () => {
    const { container, onChange } = mount(DEFAULT_STATE);
    const start = container.querySelector("#start-date") as HTMLInputElement;
    const end = container.querySelector("#end-date") as HTMLInputElement;
    start.value = "2023-09-01";
    end.value = "2023-03-01";
    change(end);
    expect(onChange).not.toHaveBeenCalled();
    const error = container.querySelector("#range-error") as HTMLElement;
    expect(error.hidden).toBe(false);
  });

  it("a valid range emits and clears the error", () => {
    const { container, onChange } = mount(DEFAULT_STATE);
    const start = container.querySelector("#start-date") as HTMLInputElement;
    const end = container.querySelector("#end-date") as HTMLInputElement;
    start.value = "2023-03-01";
    end.value = "2023-09-01";
    change(end);
    expect(onChange).toHaveBeenCalledTimes(1);
    const next = onChange.mock.calls[0][0] as UiState;
    expect(next.start).toBe("2023-03-01");
    expect(next.end).toBe("2023-09-01");
  });

  it("date inputs are bounded by the store's date span", () => {
    const { container } = mount(DEFAULT_STATE);
    const start = container.querySelector("#start-date") as HTMLInputElement;
    expect(start.min).toBe(metaDoc.date_span!.start);
    expect(start.max).toBe(metaDoc.date_span!.end);
  });
});
