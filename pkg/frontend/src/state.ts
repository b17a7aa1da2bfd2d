// UI state, fully serializable to the URL query string so views are
// shareable. Comparison mode is not stored separately: it is defined as
// penetration === "all", which keeps the two trivially consistent.

export type PenetrationChoice = 20 | 30 | 50 | "all";
export type ResolutionChoice = "15min" | "1h";

export interface UiState {
  penetration: PenetrationChoice;
  resolution: ResolutionChoice;
  start: string | null; // YYYY-MM-DD
  end: string | null;
  months: number[] | null; // sorted, unique, subset of 1..12
}

export const DEFAULT_STATE: UiState = {
  penetration: 20,
  resolution: "15min",
  start: null,
  end: null,
  months: null,
};

export function comparisonMode(state: UiState): boolean {
  return state.penetration === "all";
}

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;

export function parseState(search: string): UiState {
  const params = new URLSearchParams(search);
  const state: UiState = { ...DEFAULT_STATE, months: null };

  const pen = params.get("penetration");
  if (pen === "all") state.penetration = "all";
  else if (pen !== null && ["20", "30", "50"].includes(pen)) {
    state.penetration = Number(pen) as 20 | 30 | 50;
  }

  const res = params.get("resolution");
  if (res === "15min" || res === "1h") state.resolution = res;

  const start = params.get("start");
  if (start !== null && DATE_RE.test(start)) state.start = start;
  const end = params.get("end");
  if (end !== null && DATE_RE.test(end)) state.end = end;

  const months = params.get("months");
  if (months !== null && months.length > 0) {
    const parsed = months
      .split(",")
      .map((part) => Number(part))
      .filter((m) => Number.isInteger(m) && m >= 1 && m <= 12);
    if (parsed.length > 0) {
      state.months = [...new Set(parsed)].sort((a, b) => a - b);
    }
  }
  return state;
}

export function serializeState(state: UiState): string {
  const params = new URLSearchParams();
  params.set("penetration", String(state.penetration));
  params.set("resolution", state.resolution);
  if (state.start) params.set("start", state.start);
  if (state.end) params.set("end", state.end);
  if (state.months && state.months.length > 0) params.set("months", state.months.join(","));
  return params.toString();
}

export function validDateRange(state: UiState): boolean {
  if (state.start && state.end) return state.start <= state.end;
  return true;
}
