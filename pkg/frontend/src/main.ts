// DOM wiring for the single-page viewer. All rendering decisions live in
// scene.ts; this file only moves events in and scenes out.

import { fragmentJson, pruningFragment, rankFeatures } from "./ranking.js";
import { drawScene } from "./render.js";
import { SchemaError } from "./schema.js";
import { edgeSegments, graphScene, pickEdge, surfaceScene } from "./scene.js";
import { loadDocument, selectEdge, setMode, setPhaseOffset, setThreshold } from "./state.js";
import type { SurfaceMode, ViewState } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

const graphCanvas = $<HTMLCanvasElement>("graph");
const surfaceCanvas = $<HTMLCanvasElement>("surface");
const banner = $<HTMLDivElement>("banner");
const rankingList = $<HTMLOListElement>("ranking");
const selectedLabel = $<HTMLSpanElement>("selected");

let state: ViewState | null = null;

const graphVp = { width: graphCanvas.width, height: graphCanvas.height, margin: 48 };
const surfaceVp = { width: surfaceCanvas.width, height: surfaceCanvas.height, margin: 24 };

function note(msg: string, isError = false): void {
  banner.textContent = msg;
  banner.className = isError ? "banner error" : "banner";
}

function redraw(): void {
  if (state === null) return;
  drawScene(graphCanvas.getContext("2d")!, graphScene(state, graphVp));
  drawScene(surfaceCanvas.getContext("2d")!, surfaceScene(state, surfaceVp));
  const sel = state.selected;
  selectedLabel.textContent = sel ? `edge (${sel.l}, ${sel.q}, ${sel.p})` : "none";

  rankingList.replaceChildren(
    ...rankFeatures(state.doc).map((f) => {
      const li = document.createElement("li");
      li.textContent = `${f.name} — ${f.score.toFixed(4)}`;
      return li;
    }),
  );
}

$<HTMLInputElement>("file").addEventListener("change", (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (!file) return;
  file.text().then((text) => {
    try {
      state = loadDocument(text);
      note(`loaded ${file.name}: widths ${state.doc.widths.join("x")}`);
      redraw();
    } catch (e) {
      // keep the previous document; never render a partial parse
      if (e instanceof SchemaError) note(`cannot load: ${e.message}`, true);
      else throw e;
    }
  });
});

graphCanvas.addEventListener("click", (ev) => {
  if (state === null) return;
  const rect = graphCanvas.getBoundingClientRect();
  const key = pickEdge(
    edgeSegments(state.doc, graphVp),
    ev.clientX - rect.left,
    ev.clientY - rect.top,
  );
  if (key === null) return;
  const t = selectEdge(state, key);
  state = t.state;
  if (t.message) note(t.message, true);
  redraw();
});

$<HTMLSelectElement>("mode").addEventListener("change", (ev) => {
  if (state === null) return;
  state = setMode(state, (ev.target as HTMLSelectElement).value as SurfaceMode);
  redraw();
});

$<HTMLInputElement>("offset").addEventListener("input", (ev) => {
  if (state === null) return;
  state = setPhaseOffset(state, Number((ev.target as HTMLInputElement).value));
  redraw();
});

$<HTMLInputElement>("threshold").addEventListener("input", (ev) => {
  if (state === null) return;
  state = setThreshold(state, Number((ev.target as HTMLInputElement).value));
  redraw();
});

$<HTMLButtonElement>("export").addEventListener("click", () => {
  if (state === null) return;
  const ranked = rankFeatures(state.doc);
  const k = Math.min(ranked.length, Number($<HTMLInputElement>("topk").value) || 3);
  const blob = new Blob([fragmentJson(pruningFragment(ranked, k))], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = `prune_top${k}.json`;
  a.click();
  URL.revokeObjectURL(a.href);
});

note("load an export-viz JSON document to begin");
