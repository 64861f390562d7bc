import { describe, expect, it } from "vitest";

import {
  CONTINUOUS_HUE,
  categoricalColor,
  categoricalHues,
  cellColor,
  continuousColor,
  isRedHue,
  normalise,
} from "../src/color";

function hueOf(hsl: string): number {
  const match = /hsl\((\d+)/.exec(hsl);
  if (!match) throw new Error(`not hsl: ${hsl}`);
  return Number(match[1]);
}

function saturationOf(hsl: string): number {
  return Number(/,\s*(\d+)%/.exec(hsl)![1]);
}

describe("categorical palette", () => {
  it("never uses a hue in the red band", () => {
    for (const hue of categoricalHues()) {
      expect(isRedHue(hue), `hue ${hue} reads as red`).toBe(false);
    }
    for (let i = 0; i < 40; i++) {
      expect(isRedHue(hueOf(categoricalColor(i)))).toBe(false);
    }
  });

  it("stays desaturated", () => {
    for (let i = 0; i < 10; i++) {
      expect(saturationOf(categoricalColor(i))).toBeLessThanOrEqual(50);
    }
  });

  it("flags actual reds", () => {
    expect(isRedHue(0)).toBe(true);
    expect(isRedHue(350)).toBe(true);
    expect(isRedHue(15)).toBe(true);
    expect(isRedHue(211)).toBe(false);
  });
});

describe("continuous scale", () => {
  it("is a single blue hue with saturation growing with the value", () => {
    let previous = -1;
    for (const t of [0, 0.25, 0.5, 0.75, 1]) {
      const color = continuousColor(t);
      expect(hueOf(color)).toBe(CONTINUOUS_HUE);
      const saturation = saturationOf(color);
      expect(saturation).toBeGreaterThan(previous);
      previous = saturation;
    }
  });

  it("clamps out-of-range inputs", () => {
    expect(continuousColor(-1)).toBe(continuousColor(0));
    expect(continuousColor(2)).toBe(continuousColor(1));
  });
});

describe("cell colour", () => {
  it("uses a neutral fill for zero and saturates with count", () => {
    expect(saturationOf(cellColor(0, 10))).toBeLessThan(10);
    expect(saturationOf(cellColor(10, 10))).toBeGreaterThan(saturationOf(cellColor(2, 10)));
  });
});

describe("normalise", () => {
  it("maps numbers and timestamps onto [0, 1]", () => {
    expect(normalise([10, 20, 30])).toEqual([0, 0.5, 1]);
    const ts = normalise(["2021-03-01T00:00:00Z", "2021-03-03T00:00:00Z", "2021-03-05T00:00:00Z"]);
    expect(ts).toEqual([0, 0.5, 1]);
  });

  it("degrades to midpoints when all values are equal", () => {
    expect(normalise([5, 5])).toEqual([0.5, 0.5]);
  });
});
