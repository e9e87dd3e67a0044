// ViewState transitions. All pure: each returns a new state (or the same
// state plus a message when the request is a no-op).

import { parseDocument } from "./schema.js";
import type { EdgeKey, SurfaceMode, ViewState, VizDocument } from "./types.js";

export function initialState(doc: VizDocument): ViewState {
  return { doc, selected: null, relevanceThreshold: 0, phaseOffset: 0, mode: "heatmap" };
}

// Throws SchemaError on malformed input; callers render an error banner and
// keep whatever state they had.
export function loadDocument(text: string): ViewState {
  return initialState(parseDocument(text));
}

export interface Transition {
  state: ViewState;
  message?: string;
}

export function selectEdge(state: ViewState, key: EdgeKey): Transition {
  const exists = state.doc.relevance.edges.some(
    (e) => e.l === key.l && e.q === key.q && e.p === key.p,
  );
  if (!exists) {
    return { state, message: `no edge (${key.l},${key.q},${key.p}) in this document` };
  }
  return { state: { ...state, selected: key } };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selected: null };
}

export function setThreshold(state: ViewState, threshold: number): ViewState {
  return { ...state, relevanceThreshold: Math.min(1, Math.max(0, threshold)) };
}

export function setPhaseOffset(state: ViewState, offset: number): ViewState {
  return { ...state, phaseOffset: offset };
}

export function setMode(state: ViewState, mode: SurfaceMode): ViewState {
  return { ...state, mode };
}
