// Pure scene construction: (VizDocument, ViewState, Viewport) -> primitives.
// Everything the canvas adapter draws is decided here, which is what makes
// the snapshot tests meaningful.

import { phaseColor, rgbCss } from "./colormap.js";
import { layoutVertices, Viewport } from "./layout.js";
import type { EdgeKey, VizDocument, VizSurface, ViewState } from "./types.js";

export const OPACITY_FLOOR = 0.05;

export type Primitive =
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number; opacity: number }
  | { kind: "circle"; x: number; y: number; r: number; fill: string; opacity: number }
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill: string }
  | { kind: "poly"; points: number[]; fill: string }
  | { kind: "text"; x: number; y: number; text: string; fill: string; align: "left" | "center" | "right" };

export interface Scene {
  width: number;
  height: number;
  prims: Primitive[];
}

function r2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function edgeOpacity(score: number, threshold: number): number {
  const visible = score >= threshold ? score : 0;
  return r2(Math.min(1, Math.max(OPACITY_FLOOR, visible)));
}

export interface EdgeSegment extends EdgeKey {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export function edgeSegments(doc: VizDocument, vp: Viewport): EdgeSegment[] {
  const pos = layoutVertices(doc.widths, vp);
  return doc.relevance.edges.map((e) => {
    const a = pos.get(`${e.l}/${e.p}`)!;
    const b = pos.get(`${e.l + 1}/${e.q}`)!;
    return { l: e.l, q: e.q, p: e.p, x1: a.x, y1: a.y, x2: b.x, y2: b.y };
  });
}

function pointSegmentDistance(x: number, y: number, s: EdgeSegment): number {
  const dx = s.x2 - s.x1;
  const dy = s.y2 - s.y1;
  const len2 = dx * dx + dy * dy;
  const t = len2 === 0 ? 0 : Math.min(1, Math.max(0, ((x - s.x1) * dx + (y - s.y1) * dy) / len2));
  const px = s.x1 + t * dx;
  const py = s.y1 + t * dy;
  return Math.hypot(x - px, y - py);
}

// The edge under the cursor, or null when none is within tolerance.
export function pickEdge(segments: EdgeSegment[], x: number, y: number, tol = 6): EdgeKey | null {
  let best: EdgeSegment | null = null;
  let bestD = tol;
  for (const s of segments) {
    const d = pointSegmentDistance(x, y, s);
    if (d <= bestD) {
      bestD = d;
      best = s;
    }
  }
  return best === null ? null : { l: best.l, q: best.q, p: best.p };
}

export function graphScene(state: ViewState, vp: Viewport): Scene {
  const doc = state.doc;
  const pos = layoutVertices(doc.widths, vp);
  const prims: Primitive[] = [];
  const sel = state.selected;

  for (const e of doc.relevance.edges) {
    const a = pos.get(`${e.l}/${e.p}`)!;
    const b = pos.get(`${e.l + 1}/${e.q}`)!;
    const isSel = sel !== null && sel.l === e.l && sel.q === e.q && sel.p === e.p;
    prims.push({
      kind: "line",
      x1: r2(a.x), y1: r2(a.y), x2: r2(b.x), y2: r2(b.y),
      color: isSel ? "#e05c00" : "#2060c0",
      width: isSel ? 3 : 1.5,
      opacity: edgeOpacity(e.score, state.relevanceThreshold),
    });
  }

  for (const v of doc.relevance.vertices) {
    const p = pos.get(`${v.l}/${v.i}`)!;
    prims.push({
      kind: "circle",
      x: r2(p.x), y: r2(p.y), r: 7,
      fill: "#10254a",
      opacity: r2(Math.min(1, Math.max(OPACITY_FLOOR, v.score))),
    });
    if (v.l === 0) {
      prims.push({
        kind: "text",
        x: r2(p.x - 12), y: r2(p.y + 4),
        text: doc.feature_names[v.i] ?? `feature${v.i}`,
        fill: "#222222",
        align: "right",
      });
    }
  }
  return { width: vp.width, height: vp.height, prims };
}

function findSurface(doc: VizDocument, key: EdgeKey): VizSurface | undefined {
  return doc.surfaces.find((s) => s.l === key.l && s.q === key.q && s.p === key.p);
}

// Heatmap: hue from phase, brightness from magnitude relative to the
// surface's own maximum. A zero surface stays black.
function heatmapScene(s: VizSurface, offset: number, vp: Viewport): Scene {
  const res = s.resolution;
  const side = Math.min(vp.width, vp.height) - 2 * vp.margin;
  const cell = side / res;
  const ox = (vp.width - side) / 2;
  const oy = (vp.height - side) / 2;
  const maxMag = Math.max(...s.magnitude);
  const prims: Primitive[] = [];
  for (let i = 0; i < res; i++) {
    for (let j = 0; j < res; j++) {
      const idx = i * res + j;
      const value = maxMag > 0 ? (s.magnitude[idx] as number) / maxMag : 0;
      const fill = rgbCss(phaseColor(s.phase[idx] as number, offset, value));
      prims.push({
        kind: "rect",
        x: r2(ox + i * cell),
        y: r2(oy + (res - 1 - j) * cell), // im axis points up on screen
        w: r2(cell),
        h: r2(cell),
        fill,
      });
    }
  }
  return { width: vp.width, height: vp.height, prims };
}

// Isometric 3-D: height is the magnitude, color is the phase. Quads are
// painted back to front so nearer cells overdraw farther ones.
function surface3dScene(s: VizSurface, offset: number, vp: Viewport): Scene {
  const res = s.resolution;
  const maxMag = Math.max(...s.magnitude);
  const unit = (Math.min(vp.width, vp.height) - 2 * vp.margin) / (2 * res);
  const hScale = maxMag > 0 ? (vp.height - 2 * vp.margin) / (3 * maxMag) : 0;
  const cx = vp.width / 2;
  const cy = vp.margin + (vp.height - 2 * vp.margin) * 0.3;

  const project = (i: number, j: number, h: number): [number, number] => [
    cx + (i - j) * unit * Math.SQRT1_2 * 1.6,
    cy + (i + j - res + 1) * unit * 0.8 - h * hScale,
  ];

  const cells: { depth: number; prim: Primitive }[] = [];
  for (let i = 0; i < res - 1; i++) {
    for (let j = 0; j < res - 1; j++) {
      const h00 = s.magnitude[i * res + j] as number;
      const h10 = s.magnitude[(i + 1) * res + j] as number;
      const h11 = s.magnitude[(i + 1) * res + j + 1] as number;
      const h01 = s.magnitude[i * res + j + 1] as number;
      const quad = [
        ...project(i, j, h00),
        ...project(i + 1, j, h10),
        ...project(i + 1, j + 1, h11),
        ...project(i, j + 1, h01),
      ].map(r2);
      const value = maxMag > 0 ? 0.35 + (0.65 * (h00 + h10 + h11 + h01)) / (4 * maxMag) : 0.35;
      const fill = rgbCss(phaseColor(s.phase[i * res + j] as number, offset, value));
      cells.push({ depth: i + j, prim: { kind: "poly", points: quad, fill } });
    }
  }
  cells.sort((a, b) => a.depth - b.depth);
  return { width: vp.width, height: vp.height, prims: cells.map((c) => c.prim) };
}

// The selected edge's magnitude/phase plot; an empty scene when nothing is
// selected.
export function surfaceScene(state: ViewState, vp: Viewport): Scene {
  if (state.selected === null) return { width: vp.width, height: vp.height, prims: [] };
  const s = findSurface(state.doc, state.selected);
  if (!s) return { width: vp.width, height: vp.height, prims: [] };
  return state.mode === "heatmap"
    ? heatmapScene(s, state.phaseOffset, vp)
    : surface3dScene(s, state.phaseOffset, vp);
}
