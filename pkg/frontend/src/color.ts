// Colour rules for the facet plot and grids.
//
// Continuous values use a graduated saturation of a single blue hue.
// Categorical values use a desaturated cycle that deliberately avoids the
// red band: early demos showed anything red reads as "danger".

export const CONTINUOUS_HUE = 211; // blue

// Hues considered "red" and therefore banned from the categorical cycle.
export const RED_BAND: [number, number] = [330, 25]; // wraps past 360

const CATEGORICAL_HUES = [211, 95, 260, 170, 45, 300, 135, 230, 70, 190];

export function isRedHue(hue: number): boolean {
  const h = ((hue % 360) + 360) % 360;
  const [lo, hi] = RED_BAND;
  return h >= lo || h <= hi;
}

export function categoricalColor(index: number): string {
  const hue = CATEGORICAL_HUES[index % CATEGORICAL_HUES.length];
  return `hsl(${hue}, 38%, 58%)`;
}

export function categoricalHues(): number[] {
  return [...CATEGORICAL_HUES];
}

/** t in [0, 1] -> saturation ramp of the single continuous hue. */
export function continuousColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const saturation = 8 + clamped * 80;
  const lightness = 88 - clamped * 42;
  return `hsl(${CONTINUOUS_HUE}, ${saturation.toFixed(0)}%, ${lightness.toFixed(0)}%)`;
}

/** Bar-cell fill for grid counts: saturation grows with count / max. */
export function cellColor(count: number, max: number): string {
  if (count <= 0 || max <= 0) return "hsl(211, 8%, 92%)";
  return continuousColor(count / max);
}

/** Map raw color values (numbers or ISO strings) onto [0, 1]. */
export function normalise(values: (string | number)[]): number[] {
  const numeric = values.map((v) =>
    typeof v === "number" ? v : Date.parse(v) || Number(v) || 0
  );
  const lo = Math.min(...numeric);
  const hi = Math.max(...numeric);
  if (!isFinite(lo) || hi === lo) return numeric.map(() => 0.5);
  return numeric.map((v) => (v - lo) / (hi - lo));
}
