/** Typed client for the claimsift session API. */

export interface PassageRow {
  passage_id: string;
  text: string;
  class_ids: number[];
  source_link: string;
  origin: "backend" | "upload";
  match_spans: [number, number][];
}

export interface ResultsPayload {
  distribution: Record<string, number>;
  passages: PassageRow[];
  total: number;
  message?: string;
}

export interface AnalyzeSummary {
  distribution: Record<string, number>;
  total: number;
  message?: string;
}

export interface UploadReceipt {
  upload_id: string;
  filename: string;
  size: number;
}

export interface ResultsQuery {
  classId?: number | null;
  query?: string;
  page?: number;
  pageSize?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    body = null;
  }
  if (!resp.ok) {
    const message =
      body !== null && typeof body === "object" && "error" in body
        ? String((body as { error: unknown }).error)
        : `request failed with status ${resp.status}`;
    throw new ApiError(resp.status, message);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async createSession(): Promise<string> {
    const resp = await fetch(`${this.base}/api/session`, { method: "POST" });
    const data = await unwrap<{ session_id: string }>(resp);
    return data.session_id;
  }

  async upload(sessionId: string, file: File): Promise<UploadReceipt> {
    const form = new FormData();
    form.append("file", file, file.name);
    const resp = await fetch(`${this.base}/api/session/${sessionId}/upload`, {
      method: "POST",
      body: form,
    });
    return unwrap<UploadReceipt>(resp);
  }

  async analyze(
    sessionId: string,
    sources: { useUploads: boolean; useBackend: boolean },
  ): Promise<AnalyzeSummary> {
    const resp = await fetch(`${this.base}/api/session/${sessionId}/analyze`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        use_uploads: sources.useUploads,
        use_backend: sources.useBackend,
      }),
    });
    return unwrap<AnalyzeSummary>(resp);
  }

  async results(
    sessionId: string,
    query: ResultsQuery = {},
    signal?: AbortSignal,
  ): Promise<ResultsPayload> {
    const params = new URLSearchParams();
    if (query.classId !== undefined && query.classId !== null) {
      params.set("class", String(query.classId));
    }
    if (query.query) params.set("q", query.query);
    if (query.page) params.set("page", String(query.page));
    if (query.pageSize) params.set("page_size", String(query.pageSize));
    const suffix = params.toString() ? `?${params.toString()}` : "";
    const resp = await fetch(`${this.base}/api/session/${sessionId}/results${suffix}`, { signal });
    return unwrap<ResultsPayload>(resp);
  }

  async endSession(sessionId: string): Promise<void> {
    const resp = await fetch(`${this.base}/api/session/${sessionId}`, { method: "DELETE" });
    await unwrap<unknown>(resp);
  }
}
