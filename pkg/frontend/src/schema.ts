// Strict parsing of export-viz documents. A file either yields a complete
// VizDocument or a SchemaError; nothing is rendered from a partial parse.

import type { VizDocument, VizEdge, VizSurface, VizVertex } from "./types.js";

export const SCHEMA_VERSION = 1;

export class SchemaError extends Error {}

function fail(msg: string): never {
  throw new SchemaError(msg);
}

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function numberArray(v: unknown, what: string): number[] {
  if (!Array.isArray(v) || v.some((x) => typeof x !== "number" || !Number.isFinite(x))) {
    fail(`${what} must be an array of finite numbers`);
  }
  return v as number[];
}

function index(v: unknown, what: string): number {
  if (typeof v !== "number" || !Number.isInteger(v) || v < 0) fail(`${what} must be a non-negative integer`);
  return v as number;
}

function parseEdge(v: unknown, i: number): VizEdge {
  if (!isObject(v)) fail(`relevance.edges[${i}] must be an object`);
  const score = v.score;
  const sigma = v.sigma;
  if (typeof score !== "number" || typeof sigma !== "number") fail(`relevance.edges[${i}] needs numeric score/sigma`);
  return { l: index(v.l, "edge.l"), q: index(v.q, "edge.q"), p: index(v.p, "edge.p"), score, sigma };
}

function parseVertex(v: unknown, i: number): VizVertex {
  if (!isObject(v)) fail(`relevance.vertices[${i}] must be an object`);
  if (typeof v.score !== "number") fail(`relevance.vertices[${i}] needs a numeric score`);
  return { l: index(v.l, "vertex.l"), i: index(v.i, "vertex.i"), score: v.score };
}

function parseSurface(v: unknown, i: number): VizSurface {
  if (!isObject(v)) fail(`surfaces[${i}] must be an object`);
  const resolution = index(v.resolution, `surfaces[${i}].resolution`);
  const magnitude = numberArray(v.magnitude, `surfaces[${i}].magnitude`);
  const phase = numberArray(v.phase, `surfaces[${i}].phase`);
  const cells = resolution * resolution;
  if (magnitude.length !== cells || phase.length !== cells) {
    fail(`surfaces[${i}] expects ${cells} samples per channel`);
  }
  for (const ph of phase) {
    if (!(ph > -Math.PI && ph <= Math.PI)) fail(`surfaces[${i}] phase ${ph} outside (-pi, pi]`);
  }
  return {
    l: index(v.l, `surfaces[${i}].l`),
    q: index(v.q, `surfaces[${i}].q`),
    p: index(v.p, `surfaces[${i}].p`),
    resolution,
    magnitude,
    phase,
  };
}

export function parseDocument(text: string): VizDocument {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    fail(`not valid JSON: ${(e as Error).message}`);
  }
  if (!isObject(raw)) fail("document must be a JSON object");
  if (raw.kind !== "vizdocument") fail(`unknown document kind ${JSON.stringify(raw.kind)}`);
  if (raw.version !== SCHEMA_VERSION) {
    fail(`schema version ${JSON.stringify(raw.version)} not supported (viewer speaks ${SCHEMA_VERSION})`);
  }

  const widths = numberArray(raw.widths, "widths");
  if (widths.length < 2 || widths.some((w) => !Number.isInteger(w) || w < 1)) {
    fail("widths must hold at least two positive integers");
  }

  const grid = raw.grid;
  if (
    !isObject(grid) ||
    typeof grid.lo !== "number" ||
    typeof grid.hi !== "number" ||
    typeof grid.points !== "number" ||
    typeof grid.bandwidth !== "number"
  ) {
    fail("grid must carry lo/hi/points/bandwidth");
  }

  const rel = raw.relevance;
  if (!isObject(rel) || !Array.isArray(rel.edges) || !Array.isArray(rel.vertices)) {
    fail("relevance must carry edges and vertices arrays");
  }
  const edges = rel.edges.map(parseEdge);
  const vertices = rel.vertices.map(parseVertex);

  if (!Array.isArray(raw.surfaces)) fail("surfaces must be an array");
  const surfaces = raw.surfaces.map(parseSurface);

  const names = raw.feature_names;
  if (!Array.isArray(names) || names.length !== widths[0] || names.some((n) => typeof n !== "string")) {
    fail(`feature_names must hold ${widths[0]} strings`);
  }

  // Every edge the relevance report names must have a sampled surface,
  // and every edge index must fit the declared widths.
  const layers = widths.length - 1;
  const surfKeys = new Set(surfaces.map((s) => `${s.l}/${s.q}/${s.p}`));
  for (const e of edges) {
    if (e.l >= layers || e.p >= (widths[e.l] as number) || e.q >= (widths[e.l + 1] as number)) {
      fail(`edge (${e.l},${e.q},${e.p}) outside widths ${widths.join("x")}`);
    }
    if (!surfKeys.has(`${e.l}/${e.q}/${e.p}`)) fail(`edge (${e.l},${e.q},${e.p}) has no surface`);
  }

  return {
    version: SCHEMA_VERSION,
    kind: "vizdocument",
    widths,
    output_domain: String(raw.output_domain),
    grid: { lo: grid.lo, hi: grid.hi, points: grid.points, bandwidth: grid.bandwidth },
    norm_variant: String(raw.norm_variant),
    csilu_variant: String(raw.csilu_variant),
    parameters: numberArray(raw.parameters, "parameters"),
    layout: raw.layout,
    relevance: { edges, vertices },
    surfaces,
    feature_names: names as string[],
  };
}
