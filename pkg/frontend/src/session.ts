import { ApiClient, ApiError } from "./api.js";
import { buildGroundingGraph, GroundingGraph } from "./graph.js";
import { gridFromResult, GridModel } from "./grid.js";
import { chartFromSpec, ChartRender } from "./chart.js";
import type {
  AskResponse,
  AttemptTrail,
  CheckerType,
  ExplanationStyle,
} from "./types.js";

export interface Message {
  role: "user" | "system";
  text: string;
}

export interface Banner {
  level: "info" | "warn" | "error";
  text: string;
}

export interface InlineIssue {
  message: string;
  checkerType: CheckerType;
  line: number | null;
  column: number | null;
}

export interface QueryPanel {
  text: string;
  userModified: boolean;
  validated: boolean;
  issues: InlineIssue[];
}

const POSITION = /at line (\d+), column (\d+)$/;

// Checker messages embed positions only when the parser produced them;
// semantic and execution findings attach to the panel without one.
export function issueFromReport(
  checkerType: CheckerType, message: string,
): InlineIssue {
  const match = POSITION.exec(message);
  return {
    message,
    checkerType,
    line: match ? Number(match[1]) : null,
    column: match ? Number(match[2]) : null,
  };
}

/*
One analyst session against one conversation. All numbers, rows, queries,
and checker findings shown anywhere in the view come from service
responses; this class only rearranges them. A single request may be in
flight at a time and the view's controls stay disabled until it settles.
*/
export class Session {
  private client: ApiClient;

  conversationId: string | null = null;
  thread: Message[] = [];
  banners: Banner[] = [];
  query: QueryPanel = {
    text: "", userModified: false, validated: false, issues: [],
  };
  grounding: GroundingGraph | null = null;
  grid: GridModel | null = null;
  chart: ChartRender | null = null;
  attemptsTrail: AttemptTrail[] = [];
  lastStatus: "Accepted" | "Exhausted" | null = null;
  explanation: string | null = null;
  pending = false;

  constructor(client: ApiClient) {
    this.client = client;
  }

  get controlsDisabled(): boolean {
    return this.pending;
  }

  get executeEnabled(): boolean {
    if (this.query.text === "") return false;
    if (this.query.userModified) return this.query.validated;
    return this.lastStatus === "Accepted";
  }

  get archiveEnabled(): boolean {
    return this.lastStatus === "Accepted" && this.grid !== null
      && !this.query.userModified;
  }

  async bind(sourceId: string): Promise<void> {
    this.conversationId = await this.client.openConversation(sourceId);
  }

  private cid(): string {
    if (this.conversationId === null) {
      throw new Error("session is not bound to a data source");
    }
    return this.conversationId;
  }

  // Refuses overlapping requests locally instead of letting the service
  // answer 409 for races we can see coming.
  private async withLock<T>(work: () => Promise<T>): Promise<T | null> {
    if (this.pending) {
      this.banners.push({
        level: "warn",
        text: "A request is already in flight; wait for it to finish.",
      });
      return null;
    }
    this.pending = true;
    try {
      return await work();
    } finally {
      this.pending = false;
    }
  }

  private bannerFor(error: unknown): void {
    if (!(error instanceof ApiError)) {
      this.banners.push({ level: "error", text: String(error) });
      return;
    }
    switch (error.code) {
      case "busy":
        this.banners.push({
          level: "warn",
          text: "The conversation is busy with another request; try again.",
        });
        break;
      case "no_seed":
        this.banners.push({
          level: "warn",
          text: `No ontology entity matched the question (${error.message}). `
            + "Try rephrasing it.",
        });
        break;
      case "guard":
        this.banners.push({
          level: "error",
          text: `Blocked by the read-only policy: ${error.message}.`,
        });
        break;
      default:
        this.banners.push({
          level: "error",
          text: `${error.code}: ${error.message}`,
        });
    }
  }

  async ask(question: string,
            style?: ExplanationStyle): Promise<AskResponse | null> {
    return this.withLock(async () => {
      this.banners = [];
      let response: AskResponse;
      try {
        response = await this.client.ask(this.cid(), question, style);
      } catch (error) {
        this.bannerFor(error);
        return null;
      }
      this.thread.push({ role: "user", text: question });
      this.grounding = buildGroundingGraph(response.sub_ontology);
      this.attemptsTrail = response.attempts;
      this.lastStatus = response.status;
      if (response.status === "Accepted" && response.query !== null) {
        this.thread.push({ role: "system", text: response.query });
        this.thread.push({
          role: "system",
          text: `accepted after ${response.attempts.length} attempt(s)`,
        });
        this.query = {
          text: response.query, userModified: false,
          validated: true, issues: [],
        };
        this.explanation = response.explanation;
        this.grid = response.result ? gridFromResult(response.result) : null;
        this.chart = null;
      } else {
        this.banners.push({
          level: "error",
          text: `Generation exhausted after ${response.attempts.length} `
            + "attempts; see the checker trail.",
        });
      }
      return response;
    });
  }

  // Feedback text rides the same conversation, so history carries context.
  followUp(feedback: string): Promise<AskResponse | null> {
    return this.ask(feedback);
  }

  async edit(text: string): Promise<void> {
    this.query = {
      text, userModified: true, validated: false, issues: [],
    };
    await this.withLock(async () => {
      try {
        const verdict = await this.client.validate(this.cid(), text);
        this.query.validated = verdict.ok;
        this.query.issues = verdict.reports
          .filter((r) => r.status === "Invalid" && r.message !== null)
          .map((r) => issueFromReport(r.checker_type, r.message as string));
      } catch (error) {
        this.bannerFor(error);
      }
      return null;
    });
  }

  async execute(limit?: number, offset?: number): Promise<void> {
    await this.withLock(async () => {
      this.banners = [];
      try {
        const response = await this.client.execute(this.cid(), {
          query: this.query.userModified ? this.query.text : undefined,
          limit,
          offset,
        });
        this.grid = gridFromResult(response.result);
      } catch (error) {
        this.bannerFor(error);
      }
      return null;
    });
  }

  async visualize(): Promise<void> {
    await this.withLock(async () => {
      if (this.grid === null) {
        this.banners.push({
          level: "warn", text: "Execute a query before charting it.",
        });
        return null;
      }
      try {
        const spec = await this.client.visualize(this.cid());
        this.chart = chartFromSpec(spec, this.grid);
      } catch (error) {
        this.bannerFor(error);
      }
      return null;
    });
  }

  async archive(): Promise<string | null> {
    return this.withLock(async () => {
      try {
        const archived = await this.client.archive(this.cid());
        this.banners.push({
          level: "info", text: `Archived as ${archived.testcase_id}.`,
        });
        return archived.testcase_id;
      } catch (error) {
        this.bannerFor(error);
        return null;
      }
    });
  }
}
