import type { OntologyEdge, SubOntologyPayload } from "./types.js";

export interface GraphNode {
  id: string;
  seed: boolean;
  score: number | null;
}

export interface GroundingGraph {
  nodes: GraphNode[];
  edges: OntologyEdge[];
}

// Fidelity contract: the rendered graph is exactly the payload. Every class
// becomes a node (seed flag and score attached when present) and every edge
// is kept verbatim; nothing is filtered, merged, or invented client-side.
export function buildGroundingGraph(sub: SubOntologyPayload): GroundingGraph {
  const seeds = new Set(sub.seeds);
  const nodes = sub.classes.map((id) => ({
    id,
    seed: seeds.has(id),
    score: id in sub.scores ? sub.scores[id] : null,
  }));
  const edges = sub.edges.map((e) => ({ ...e }));
  return { nodes, edges };
}

export function describeEdge(edge: OntologyEdge): string {
  return `${edge.source} -[${edge.property}]-> ${edge.target}`;
}

// Circle layout for the SVG panel. Pure geometry, no data decisions.
export function layoutOnCircle(
  graph: GroundingGraph, radius: number, cx: number, cy: number,
): Map<string, { x: number; y: number }> {
  const positions = new Map<string, { x: number; y: number }>();
  const n = graph.nodes.length;
  graph.nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    positions.set(node.id, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  return positions;
}
