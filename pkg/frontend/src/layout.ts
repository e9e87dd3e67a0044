// Layer-by-layer graph layout: layers left to right, vertices of one layer
// spread evenly top to bottom. Pure geometry; no DOM.

export interface Point {
  x: number;
  y: number;
}

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export function vertexPosition(widths: number[], l: number, i: number, vp: Viewport): Point {
  const layers = widths.length;
  const innerW = vp.width - 2 * vp.margin;
  const innerH = vp.height - 2 * vp.margin;
  const x = layers === 1 ? vp.width / 2 : vp.margin + (innerW * l) / (layers - 1);
  const count = widths[l] ?? 1;
  // one vertex sits centered; k vertices split the height into k+1 gaps
  const y = vp.margin + (innerH * (i + 1)) / (count + 1);
  return { x, y };
}

export function layoutVertices(widths: number[], vp: Viewport): Map<string, Point> {
  const out = new Map<string, Point>();
  widths.forEach((count, l) => {
    for (let i = 0; i < count; i++) {
      out.set(`${l}/${i}`, vertexPosition(widths, l, i, vp));
    }
  });
  return out;
}
