import { vi } from "vitest";

import { PassageRow, ResultsPayload } from "../src/api";

export function passage(partial: Partial<PassageRow> & { passage_id: string }): PassageRow {
  return {
    text: "A placeholder passage.",
    class_ids: [0],
    source_link: "https://doi.org/10.1/x",
    origin: "backend",
    match_spans: [],
    ...partial,
  };
}

export function payload(partial: Partial<ResultsPayload> = {}): ResultsPayload {
  const passages = partial.passages ?? [passage({ passage_id: "p1" })];
  return {
    distribution: partial.distribution ?? { "0": passages.length },
    passages,
    total: partial.total ?? passages.length,
    ...(partial.message !== undefined ? { message: partial.message } : {}),
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Installs a fetch mock that dispatches on (method, url) and records calls. */
export function mockFetch(
  handler: (url: string, init?: RequestInit) => Response | Promise<Response>,
) {
  const spy = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    return handler(url, init);
  });
  vi.stubGlobal("fetch", spy);
  return spy;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
