// Shapes of the export-viz JSON and of the viewer's own state.

export interface GridInfo {
  lo: number;
  hi: number;
  points: number;
  bandwidth: number;
}

export interface VizEdge {
  l: number; // layer
  q: number; // target vertex in layer l+1
  p: number; // source vertex in layer l
  score: number;
  sigma: number;
}

export interface VizVertex {
  l: number;
  i: number;
  score: number;
}

export interface VizSurface {
  l: number;
  q: number;
  p: number;
  resolution: number;
  // row-major over (re index, im index), resolution^2 entries each
  magnitude: number[];
  phase: number[];
}

export interface VizDocument {
  version: number;
  kind: "vizdocument";
  widths: number[];
  output_domain: string;
  grid: GridInfo;
  norm_variant: string;
  csilu_variant: string;
  parameters: number[];
  layout: unknown;
  relevance: { edges: VizEdge[]; vertices: VizVertex[] };
  surfaces: VizSurface[];
  feature_names: string[];
}

export interface EdgeKey {
  l: number;
  q: number;
  p: number;
}

export type SurfaceMode = "heatmap" | "3d";

export interface ViewState {
  doc: VizDocument;
  selected: EdgeKey | null; // when set, always exists in doc
  relevanceThreshold: number; // edges below are dimmed to the opacity floor
  phaseOffset: number; // radians added before hue mapping
  mode: SurfaceMode;
}
