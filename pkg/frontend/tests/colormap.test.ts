import { describe, expect, it } from "vitest";

import { hsvToRgb, phaseColor, phaseToHue } from "../src/colormap.js";

// deterministic pseudo-random phases so the periodicity sweep is repeatable
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

describe("phaseToHue", () => {
  it("maps the principal branch onto [0, 1)", () => {
    const rand = lcg(1);
    for (let i = 0; i < 1000; i++) {
      const phase = (rand() - 0.5) * 2 * Math.PI;
      const h = phaseToHue(phase);
      expect(h).toBeGreaterThanOrEqual(0);
      expect(h).toBeLessThan(1);
    }
  });

  it("gives pi and -pi exactly the same hue", () => {
    expect(phaseToHue(Math.PI)).toBe(phaseToHue(-Math.PI));
    expect(phaseToHue(Math.PI)).toBe(0);
  });

  it("is 2pi-periodic", () => {
    const rand = lcg(2);
    for (let i = 0; i < 500; i++) {
      const phase = (rand() - 0.5) * 2 * Math.PI;
      const a = phaseToHue(phase);
      const b = phaseToHue(phase + 2 * Math.PI);
      const wrapped = Math.min(Math.abs(a - b), 1 - Math.abs(a - b));
      expect(wrapped).toBeLessThan(1e-12);
    }
  });

  it("shifts linearly with the offset control", () => {
    expect(phaseToHue(0, Math.PI)).toBeCloseTo(0, 15);
    expect(phaseToHue(0.5, 0.25)).toBeCloseTo(phaseToHue(0.75, 0), 15);
  });
});

describe("phaseColor", () => {
  it("renders pi and -pi as the identical color", () => {
    expect(phaseColor(Math.PI)).toEqual(phaseColor(-Math.PI));
  });

  it("closes the wheel: hue 0 and hue 1 coincide", () => {
    expect(hsvToRgb(0, 1)).toEqual(hsvToRgb(1, 1));
  });

  it("scales brightness with value", () => {
    expect(phaseColor(0, 0, 0)).toEqual({ r: 0, g: 0, b: 0 });
    const full = phaseColor(1.0, 0, 1);
    const half = phaseColor(1.0, 0, 0.5);
    expect(half.r).toBeLessThanOrEqual(full.r);
    expect(half.g).toBeLessThanOrEqual(full.g);
    expect(half.b).toBeLessThanOrEqual(full.b);
  });

  it("covers distinct hues around the wheel", () => {
    const seen = new Set<string>();
    for (let k = 0; k < 12; k++) {
      const c = phaseColor(-Math.PI + ((k + 0.5) / 12) * 2 * Math.PI);
      seen.add(`${c.r}/${c.g}/${c.b}`);
    }
    expect(seen.size).toBe(12);
  });
});
