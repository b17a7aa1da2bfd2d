// Deterministic jitter for the comparison dots: the same group key always
// produces the same layout, so re-renders are stable (the server stays
// deterministic and never jitters anything).

function hashString(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** n offsets in (-1, 1), seeded by the group key. */
export function jitterOffsets(n: number, key: string): number[] {
  const random = mulberry32(hashString(key));
  return Array.from({ length: n }, () => random() * 2 - 1);
}
