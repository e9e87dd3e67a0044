// Feature ranking from input-vertex relevance, and the pruning fragment the
// training CLI accepts as part of an experiment config.

import type { VizDocument } from "./types.js";

export interface RankedFeature {
  index: number;
  name: string;
  score: number;
}

// Descending by score, stable on ties (original feature order preserved).
export function rankFeatures(doc: VizDocument): RankedFeature[] {
  const inputs = doc.relevance.vertices.filter((v) => v.l === 0);
  const byIndex = new Map(inputs.map((v) => [v.i, v.score]));
  const order = [...byIndex.keys()].sort((a, b) => {
    const d = (byIndex.get(b) as number) - (byIndex.get(a) as number);
    return d !== 0 ? d : a - b;
  });
  return order.map((i) => ({
    index: i,
    name: doc.feature_names[i] ?? `feature${i}`,
    score: byIndex.get(i) as number,
  }));
}

export interface PruningFragment {
  feature_indices: number[];
}

// Keep the top-k features; indices sorted ascending so the fragment slots
// straight into a training config.
export function pruningFragment(ranked: RankedFeature[], k: number): PruningFragment {
  if (!Number.isInteger(k) || k < 1 || k > ranked.length) {
    throw new RangeError(`k must be in 1..${ranked.length}, got ${k}`);
  }
  return { feature_indices: ranked.slice(0, k).map((f) => f.index).sort((a, b) => a - b) };
}

export function fragmentJson(fragment: PruningFragment): string {
  return JSON.stringify(fragment, null, 2) + "\n";
}
