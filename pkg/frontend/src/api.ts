import type {
  ArchiveResponse,
  AskResponse,
  ChartSpec,
  ErrorBody,
  ExecuteResponse,
  ExplanationStyle,
  ReplayResponse,
  SearchHit,
  SourceCreated,
  SourceSummary,
  TestcaseSummary,
  ValidateResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

// Structured service error: code/message/details straight from the body.
export class ApiError extends Error {
  code: string;
  status: number;
  details: Record<string, unknown>;

  constructor(code: string, message: string, status: number,
              details: Record<string, unknown> = {}) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
    this.details = details;
  }
}

export interface CreateSourceBody {
  name: string;
  connection?: string;
  ddl?: string;
  tenant?: string;
  collection?: string;
  annotations?: Record<string, string>;
  policies?: string;
  new_version?: boolean;
}

export interface ExecuteOptions {
  query?: string;
  limit?: number;
  offset?: number;
}

export class ApiClient {
  private baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string,
                           body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      const error = payload as Partial<ErrorBody>;
      throw new ApiError(
        error.code ?? "error",
        error.message ?? `request failed with status ${response.status}`,
        response.status,
        error.details ?? {},
      );
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  createSource(body: CreateSourceBody): Promise<SourceCreated> {
    return this.request("POST", "/datasources", body);
  }

  async listSources(tenant?: string): Promise<SourceSummary[]> {
    const suffix = tenant ? `?tenant=${encodeURIComponent(tenant)}` : "";
    const payload = await this.request<{ sources: SourceSummary[] }>(
      "GET", `/datasources${suffix}`,
    );
    return payload.sources;
  }

  ontology(sourceId: string, version?: number): Promise<unknown> {
    const suffix = version === undefined ? "" : `?version=${version}`;
    return this.request("GET", `/ontologies/${sourceId}${suffix}`);
  }

  async searchOntology(sourceId: string, q: string,
                       k = 5): Promise<SearchHit[]> {
    const query = `q=${encodeURIComponent(q)}&k=${k}`;
    const payload = await this.request<{ hits: SearchHit[] }>(
      "GET", `/ontologies/${sourceId}/search?${query}`,
    );
    return payload.hits;
  }

  async openConversation(sourceId: string): Promise<string> {
    const payload = await this.request<{ conversation_id: string }>(
      "POST", "/conversations", { source_id: sourceId },
    );
    return payload.conversation_id;
  }

  ask(cid: string, question: string,
      style?: ExplanationStyle): Promise<AskResponse> {
    const body: Record<string, unknown> = { question };
    if (style) body.style = style;
    return this.request("POST", `/conversations/${cid}/ask`, body);
  }

  execute(cid: string, options: ExecuteOptions = {}): Promise<ExecuteResponse> {
    return this.request("POST", `/conversations/${cid}/execute`, options);
  }

  validate(cid: string, query: string): Promise<ValidateResponse> {
    return this.request("POST", `/conversations/${cid}/validate`, { query });
  }

  async explain(cid: string, style: ExplanationStyle): Promise<string> {
    const payload = await this.request<{ text: string }>(
      "POST", `/conversations/${cid}/explain`, { style },
    );
    return payload.text;
  }

  visualize(cid: string): Promise<ChartSpec> {
    return this.request("POST", `/conversations/${cid}/visualize`);
  }

  archive(cid: string): Promise<ArchiveResponse> {
    return this.request("POST", `/conversations/${cid}/archive`);
  }

  async listTestcases(source?: string): Promise<TestcaseSummary[]> {
    const suffix = source ? `?source=${encodeURIComponent(source)}` : "";
    const payload = await this.request<{ testcases: TestcaseSummary[] }>(
      "GET", `/testcases${suffix}`,
    );
    return payload.testcases;
  }

  replay(testcaseId: string): Promise<ReplayResponse> {
    return this.request("POST", `/testcases/${testcaseId}/replay`);
  }
}
