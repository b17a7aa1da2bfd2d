// Bootstraps the app: URL -> state, sidebar -> state changes -> fresh
// queries -> re-render. In-flight queries are aborted when a newer filter
// change lands (last write wins); API failures show a banner and keep the
// last good render.

import { fetchComparison, fetchMeta, fetchPatterns } from "./api";
import { renderComparison } from "./boxplot";
import { renderPatterns } from "./heatmap";
import { renderSidebar } from "./sidebar";
import { parseState, serializeState, type UiState } from "./state";
import "./style.css";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const banner = el("error-banner");
  const comparisonPane = el("comparison-view");
  const patternsPane = el("patterns-view");

  let meta;
  try {
    meta = await fetchMeta();
  } catch (error) {
    banner.hidden = false;
    banner.textContent = `cannot reach the scoring service: ${error}`;
    return;
  }

  let state = parseState(window.location.search);
  let inflight: AbortController | null = null;

  const refresh = async () => {
    inflight?.abort();
    const controller = new AbortController();
    inflight = controller;
    try {
      const [comparison, patterns] = await Promise.all([
        fetchComparison(state, controller.signal),
        fetchPatterns(state, controller.signal),
      ]);
      if (controller.signal.aborted) return;
      banner.hidden = true;
      renderComparison(comparisonPane, comparison);
      renderPatterns(patternsPane, patterns);
    } catch (error) {
      if (controller.signal.aborted) return; // superseded by a newer change
      banner.hidden = false;
      banner.textContent = `query failed, showing last good view: ${error}`;
    }
  };

  const apply = (next: UiState) => {
    state = next;
    const query = serializeState(state);
    window.history.replaceState(null, "", `?${query}`);
    renderSidebar(el("sidebar"), meta, state, apply);
    void refresh();
  };

  renderSidebar(el("sidebar"), meta, state, apply);
  window.history.replaceState(null, "", `?${serializeState(state)}`);
  void refresh();
}

void boot();
