// Typed client for the scoring service. The UI never computes statistics:
// everything rendered comes straight out of these payloads.

import type { UiState } from "./state";

export interface MetaResponse {
  models: string[];
  reference_model: string;
  penetrations: number[];
  resolutions: string[];
  date_span: { start: string; end: string } | null;
  record_counts: { total: number; by_scenario: Record<string, number> };
  tool_version: string | null;
}

export interface BoxStatsPayload {
  median: number;
  q1: number;
  q3: number;
  whisker_lo: number;
  whisker_hi: number;
  outliers: number[];
  n: number;
}

export interface ComparisonGroup {
  penetration: number;
  resolution: string;
  model_id: string;
  n: number;
  box: BoxStatsPayload | null;
  points: { date: string; crpss: number }[];
}

export interface ComparisonResponse {
  mode: "single" | "all";
  groups: ComparisonGroup[];
}

export interface HeatmapCellPayload {
  month: number;
  hour: number;
  mean_crpss: number | null;
  n: number;
}

export interface PatternsGrid {
  penetration: number;
  months: number[];
  cells: HeatmapCellPayload[];
}

export interface PatternsResponse {
  mode: "single" | "all";
  min_mean_crpss: number | null;
  max_mean_crpss: number | null;
  grids: PatternsGrid[];
}

function comparisonQuery(state: UiState): string {
  const params = new URLSearchParams();
  params.set("penetration", String(state.penetration));
  if (state.start) params.set("start", state.start);
  if (state.end) params.set("end", state.end);
  return params.toString();
}

function patternsQuery(state: UiState): string {
  const params = new URLSearchParams();
  params.set("penetration", String(state.penetration));
  params.set("resolution", state.resolution);
  if (state.start) params.set("start", state.start);
  if (state.end) params.set("end", state.end);
  if (state.months && state.months.length > 0) params.set("months", state.months.join(","));
  return params.toString();
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) {
    throw new Error(`${url} -> HTTP ${response.status}`);
  }
  return (await response.json()) as T;
}

export const fetchMeta = (signal?: AbortSignal) => getJson<MetaResponse>("/api/meta", signal);

export const fetchComparison = (state: UiState, signal?: AbortSignal) =>
  getJson<ComparisonResponse>(`/api/comparison?${comparisonQuery(state)}`, signal);

export const fetchPatterns = (state: UiState, signal?: AbortSignal) =>
  getJson<PatternsResponse>(`/api/patterns?${patternsQuery(state)}`, signal);
