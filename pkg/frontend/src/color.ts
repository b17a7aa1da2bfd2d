// Diverging color scale anchored at zero skill: blues for positive CRPSS,
// reds for negative, neutral at exactly 0. The domain is symmetric,
// +/- max(|min|, |max|), so equal skill magnitudes get equal intensity.

export const NEUTRAL = "#f7f7f7";
const DEEP_BLUE: [number, number, number] = [8, 48, 107];
const DEEP_RED: [number, number, number] = [103, 0, 13];
const NEUTRAL_RGB: [number, number, number] = [247, 247, 247];

export function symmetricMax(min: number | null, max: number | null): number {
  const lo = min === null ? 0 : Math.abs(min);
  const hi = max === null ? 0 : Math.abs(max);
  return Math.max(lo, hi);
}

function hex(channel: number): string {
  return Math.round(channel).toString(16).padStart(2, "0");
}

function lerp(a: [number, number, number], b: [number, number, number], t: number): string {
  const mix = a.map((av, i) => av + (b[i] - av) * t) as [number, number, number];
  return `#${hex(mix[0])}${hex(mix[1])}${hex(mix[2])}`;
}

export function divergingColor(value: number, maxAbs: number): string {
  if (maxAbs <= 0 || value === 0) return NEUTRAL;
  const t = Math.max(-1, Math.min(1, value / maxAbs));
  return t > 0 ? lerp(NEUTRAL_RGB, DEEP_BLUE, t) : lerp(NEUTRAL_RGB, DEEP_RED, -t);
}

export const DEEP_BLUE_HEX = lerp(DEEP_BLUE, DEEP_BLUE, 0);
export const DEEP_RED_HEX = lerp(DEEP_RED, DEEP_RED, 0);
