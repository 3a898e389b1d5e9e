import { describe, expect, it } from "vitest";

import { buildGroundingGraph, describeEdge, layoutOnCircle } from "../src/graph.js";
import { ASK_ACCEPTED } from "./fixtures.js";

const SUB = ASK_ACCEPTED.sub_ontology;

describe("grounding graph fidelity", () => {
  it("renders one node per payload class, nothing more", () => {
    const graph = buildGroundingGraph(SUB);
    expect(graph.nodes.map((n) => n.id)).toEqual(SUB.classes);
  });

  it("keeps every payload edge verbatim", () => {
    const graph = buildGroundingGraph(SUB);
    expect(graph.edges).toEqual(SUB.edges);
    expect(graph.edges).not.toBe(SUB.edges);
  });

  it("flags exactly the seed classes", () => {
    const graph = buildGroundingGraph(SUB);
    const seeds = graph.nodes.filter((n) => n.seed).map((n) => n.id);
    expect(seeds).toEqual(SUB.seeds);
  });

  it("attaches scores only where the payload has them", () => {
    const graph = buildGroundingGraph(SUB);
    for (const node of graph.nodes) {
      if (node.id in SUB.scores) {
        expect(node.score).toBe(SUB.scores[node.id]);
      } else {
        expect(node.score).toBeNull();
      }
    }
  });

  it("describes edges with their property name", () => {
    expect(describeEdge({
      source: "salesorderheader",
      target: "currencyrate",
      property: "refersToCurrencyRate",
    })).toBe("salesorderheader -[refersToCurrencyRate]-> currencyrate");
  });

  it("lays every node out on the circle", () => {
    const graph = buildGroundingGraph(SUB);
    const positions = layoutOnCircle(graph, 100, 0, 0);
    expect(positions.size).toBe(graph.nodes.length);
    for (const { x, y } of positions.values()) {
      expect(Math.hypot(x, y)).toBeCloseTo(100, 6);
    }
  });
});
