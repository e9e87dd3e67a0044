// Cyclic phase colormap. Hue is a pure function of the phase angle and the
// user-adjustable offset; the wheel closes exactly, so a phase of π and a
// phase of −π produce bit-identical colors (the two ends of the principal
// branch are the same angle).

const TWO_PI = 2 * Math.PI;

// (-π, π] → [0, 1). π and −π both land on 0 exactly: (π+π)/2π is exactly 1
// in floats and wraps; (−π+π) is exactly 0.
export function phaseToHue(phase: number, offset = 0): number {
  let t = (phase + offset + Math.PI) / TWO_PI;
  t -= Math.floor(t);
  return t;
}

export interface Rgb {
  r: number; // 0..255 integers
  g: number;
  b: number;
}

// Plain HSV wheel at full saturation; value scales brightness.
export function hsvToRgb(hue: number, value: number): Rgb {
  const h = (hue - Math.floor(hue)) * 6;
  const sector = Math.floor(h);
  const f = h - sector;
  const p = 0;
  const q = 1 - f;
  const t = f;
  let r = 0;
  let g = 0;
  let b = 0;
  switch (sector % 6) {
    case 0: r = 1; g = t; b = p; break;
    case 1: r = q; g = 1; b = p; break;
    case 2: r = p; g = 1; b = t; break;
    case 3: r = p; g = q; b = 1; break;
    case 4: r = t; g = p; b = 1; break;
    default: r = 1; g = p; b = q; break;
  }
  return {
    r: Math.round(r * value * 255),
    g: Math.round(g * value * 255),
    b: Math.round(b * value * 255),
  };
}

export function phaseColor(phase: number, offset = 0, value = 1): Rgb {
  return hsvToRgb(phaseToHue(phase, offset), value);
}

export function rgbCss(c: Rgb): string {
  return `rgb(${c.r},${c.g},${c.b})`;
}
