import type { ResultPayload } from "./types.js";

export interface GridModel {
  columns: string[];
  columnTypes: string[];
  rows: string[][];
  totalRows: number;
  limit: number;
  offset: number;
}

export function formatCell(value: unknown): string {
  if (value === null || value === undefined) return "";
  return String(value);
}

// Formatting only. The grid never sums, counts, or rounds; every value is
// the service's, stringified.
export function gridFromResult(result: ResultPayload): GridModel {
  return {
    columns: [...result.columns],
    columnTypes: [...result.column_types],
    rows: result.rows.map((row) => row.map(formatCell)),
    totalRows: result.total_rows,
    limit: result.limit,
    offset: result.offset,
  };
}

export function pageLabel(grid: GridModel): string {
  if (grid.rows.length === 0) return `0 of ${grid.totalRows} rows`;
  const first = grid.offset + 1;
  const last = grid.offset + grid.rows.length;
  return `rows ${first}-${last} of ${grid.totalRows}`;
}
