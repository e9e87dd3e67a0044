import { describe, expect, it } from "vitest";

import { fragmentJson, pruningFragment, rankFeatures } from "../src/ranking.js";
import { parseDocument } from "../src/schema.js";
import type { VizDocument } from "../src/types.js";
import { fixtureText } from "./fixtures.js";

const f3doc = (): VizDocument => parseDocument(fixtureText("f3_2x2x1_viz.json"));

const docWithScores = (scores: number[]): VizDocument => {
  const raw = JSON.parse(fixtureText("f3_2x2x1_viz.json"));
  for (const v of raw.relevance.vertices) {
    if (v.l === 0) v.score = scores[v.i];
  }
  return parseDocument(JSON.stringify(raw));
};

describe("rankFeatures", () => {
  it("ranks the fixture's inputs descending with their names", () => {
    const ranked = rankFeatures(f3doc());
    expect(ranked).toHaveLength(2);
    expect(ranked[0]!.score).toBeGreaterThanOrEqual(ranked[1]!.score);
    expect(new Set(ranked.map((r) => r.name))).toEqual(new Set(["z1", "z2"]));
    expect(new Set(ranked.map((r) => r.index))).toEqual(new Set([0, 1]));
  });

  it("keeps the original order on ties", () => {
    const ranked = rankFeatures(docWithScores([1.0, 1.0]));
    expect(ranked.map((r) => r.index)).toEqual([0, 1]);
  });

  it("sorts strictly by score when scores differ", () => {
    const ranked = rankFeatures(docWithScores([0.25, 1.75]));
    expect(ranked.map((r) => r.index)).toEqual([1, 0]);
    expect(ranked.map((r) => r.score)).toEqual([1.75, 0.25]);
  });
});

describe("pruningFragment", () => {
  it("keeps the top-k indices sorted ascending", () => {
    const ranked = rankFeatures(docWithScores([0.25, 1.75]));
    expect(pruningFragment(ranked, 1)).toEqual({ feature_indices: [1] });
    expect(pruningFragment(ranked, 2)).toEqual({ feature_indices: [0, 1] });
  });

  it("rejects k outside 1..n", () => {
    const ranked = rankFeatures(f3doc());
    expect(() => pruningFragment(ranked, 0)).toThrow(RangeError);
    expect(() => pruningFragment(ranked, 3)).toThrow(RangeError);
    expect(() => pruningFragment(ranked, 1.5)).toThrow(RangeError);
  });

  it("serializes to a config fragment with only feature_indices", () => {
    const text = fragmentJson(pruningFragment(rankFeatures(f3doc()), 1));
    const parsed = JSON.parse(text);
    expect(Object.keys(parsed)).toEqual(["feature_indices"]);
    expect(parsed.feature_indices).toHaveLength(1);
    expect(text.endsWith("\n")).toBe(true);
  });
});
