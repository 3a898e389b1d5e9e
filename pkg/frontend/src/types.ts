// Shapes mirror the service's JSON payloads; nothing here is computed
// client-side.

export interface OntologyEdge {
  source: string;
  target: string;
  property: string;
}

export interface SubOntologyPayload {
  classes: string[];
  seeds: string[];
  scores: Record<string, number>;
  paths: string[][];
  edges: OntologyEdge[];
}

export type CheckerType = "Syntax" | "Semantic" | "Execution";

export interface CheckerReport {
  status: "Valid" | "Invalid";
  checker_type: CheckerType;
  message: string | null;
}

export interface AttemptTrail {
  query: string;
  reports: CheckerReport[];
}

export interface ResultPayload {
  columns: string[];
  column_types: string[];
  rows: unknown[][];
  total_rows: number;
  limit: number;
  offset: number;
}

export interface AskResponse {
  status: "Accepted" | "Exhausted";
  query: string | null;
  explanation: string | null;
  terms: string[];
  schema_sql: string;
  sub_ontology: SubOntologyPayload;
  attempts: AttemptTrail[];
  result: ResultPayload | null;
}

export interface ExecuteResponse {
  query: string;
  result: ResultPayload;
}

export interface ValidateResponse {
  ok: boolean;
  reports: CheckerReport[];
  repair: string;
}

export const CHART_KINDS = ["bar", "line", "scatter", "pie", "table"] as const;
export type ChartKind = (typeof CHART_KINDS)[number];

export interface ChartSpec {
  kind: ChartKind;
  x: string;
  y: string;
  series: string | null;
  title: string;
}

export interface SourceCreated {
  id: string;
  name: string;
  tenant: string;
  collection: string;
  version: number;
  checksum: string;
}

export interface SourceSummary {
  id: string;
  name: string;
  tenant: string;
  collection: string;
  versions: number[];
}

export interface SearchHit {
  entity_id: string;
  kind: string;
  similarity: number;
}

export interface ArchiveResponse {
  testcase_id: string;
  path: string;
}

export interface ReplayResponse {
  testcase_id: string;
  passed: boolean;
  diffs: string[];
}

export interface TestcaseSummary {
  id: string;
  source: string;
  question: string;
  created_at: string;
}

export interface ErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export const EXPLANATION_STYLES = [
  "Compact",
  "Verbose",
  "Formal",
  "Simple",
  "Precise",
] as const;
export type ExplanationStyle = (typeof EXPLANATION_STYLES)[number];
