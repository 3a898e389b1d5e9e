import type { FetchLike } from "../src/api.js";

export interface StubCall {
  method: string;
  path: string;
  body: unknown;
}

export interface StubRoute {
  status?: number;
  body: unknown;
}

type RouteValue = StubRoute | ((body: unknown) => StubRoute);

// Routes keyed by "METHOD /path". Values may be a canned response or a
// function of the request body; every call is recorded for assertions.
export function stubService(routes: Record<string, RouteValue>): {
  fetch: FetchLike;
  calls: StubCall[];
} {
  const calls: StubCall[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://stub");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path: url.pathname + url.search, body });
    const route = routes[`${method} ${url.pathname}`];
    if (route === undefined) {
      return new Response(
        JSON.stringify({
          code: "not_found",
          message: `no stub for ${method} ${url.pathname}`,
          details: {},
        }),
        { status: 404, headers: { "Content-Type": "application/json" } },
      );
    }
    const outcome = typeof route === "function" ? route(body) : route;
    return new Response(JSON.stringify(outcome.body), {
      status: outcome.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetch: fetchImpl, calls };
}

// A fetch that stays unresolved until release() is called, for testing the
// single-in-flight rule.
export function hangingFetch(body: unknown): {
  fetch: FetchLike;
  release: () => void;
  calls: StubCall[];
} {
  const calls: StubCall[] = [];
  let release: () => void = () => undefined;
  const gate = new Promise<void>((resolve) => {
    release = resolve;
  });
  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://stub");
    calls.push({
      method: init?.method ?? "GET",
      path: url.pathname,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    await gate;
    return new Response(JSON.stringify(body), {
      status: 200, headers: { "Content-Type": "application/json" },
    });
  };
  return { fetch: fetchImpl, release, calls };
}
