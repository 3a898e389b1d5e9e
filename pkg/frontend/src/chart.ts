import type { GridModel } from "./grid.js";
import type { ChartSpec } from "./types.js";
import { CHART_KINDS } from "./types.js";

export interface ChartPoint {
  x: string;
  y: number;
  series: string | null;
}

export type ChartRender =
  | { ok: true; spec: ChartSpec; points: ChartPoint[] }
  | { ok: false; problem: string };

// Builds the render model for the chart panel. Values are lifted straight
// out of the grid rows; a spec naming a column the grid does not have is a
// validation problem for the panel, never a reason to touch the grid.
export function chartFromSpec(spec: ChartSpec, grid: GridModel): ChartRender {
  if (!CHART_KINDS.includes(spec.kind)) {
    return { ok: false, problem: `unknown chart kind '${spec.kind}'` };
  }
  for (const column of [spec.x, spec.y, spec.series]) {
    if (column !== null && !grid.columns.includes(column)) {
      return {
        ok: false,
        problem: `chart spec names a missing column '${column}'`,
      };
    }
  }
  const xi = grid.columns.indexOf(spec.x);
  const yi = grid.columns.indexOf(spec.y);
  const si = spec.series === null ? -1 : grid.columns.indexOf(spec.series);
  const points = grid.rows.map((row) => ({
    x: row[xi],
    y: Number(row[yi]),
    series: si === -1 ? null : row[si],
  }));
  return { ok: true, spec, points };
}
