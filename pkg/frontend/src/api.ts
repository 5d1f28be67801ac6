/**
 * Typed client for the retrieval service API. Every request the UI makes
 * goes through this module; pages never hand-build URLs or parse errors
 * themselves.
 */

export interface QueryRequest {
  text?: string;
  equation?: string;
  k?: number;
  provider?: "gold" | "remote";
  excludeId?: string;
}

export interface MatchResult {
  problemId: string;
  rank: number;
  lexScore: number;
  signature: string;
  text: string;
}

export interface QueryResponse {
  results: MatchResult[];
  signature: string;
  parsedExpression: string;
}

export interface ProblemRecord {
  id: string;
  text: string;
  equation: string;
  source?: string;
  solution?: number | null;
}

export interface AddProblemResponse {
  id: string;
  indexed: boolean;
  error: string | null;
}

export interface ProblemDetail {
  id: string;
  text: string;
  equation: string;
  textNumbers: number[];
  source: string;
  solution: number | null;
}

export interface Stats {
  total: number;
  indexed: number;
  failed: number;
  buckets: number;
  largestBucket: number;
}

export type ApiErrorCode =
  | "PARSE_ERROR"
  | "NOT_FOUND"
  | "DUPLICATE_ID"
  | "BAD_REQUEST"
  | "PROVIDER_ERROR"
  | "INTERNAL";

export interface ParseErrorDetail {
  stage: string | null;
  recordId: string | null;
}

/** Non-2xx response carrying the service's structured error body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: ApiErrorCode,
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }

  parseStage(): string | null {
    if (this.code !== "PARSE_ERROR") return null;
    const detail = this.detail as ParseErrorDetail | undefined;
    return detail?.stage ?? null;
  }
}

/** The service could not be reached at all (connection refused, DNS...). */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  query(request: QueryRequest, signal?: AbortSignal): Promise<QueryResponse> {
    return this.send("POST", "/api/query", request, signal);
  }

  addProblem(record: ProblemRecord): Promise<AddProblemResponse> {
    return this.send("POST", "/api/problems", record);
  }

  getProblem(id: string): Promise<ProblemDetail> {
    return this.send("GET", `/api/problems/${encodeURIComponent(id)}`);
  }

  stats(): Promise<Stats> {
    return this.send("GET", "/api/stats");
  }

  private async send<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers:
          body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      });
    } catch (err) {
      // DOMException is not an Error subclass in every runtime
      if (isAbort(err)) throw err;
      throw new NetworkError(`cannot reach the retrieval service: ${String(err)}`);
    }
    if (!response.ok) {
      let payload: { code?: ApiErrorCode; message?: string; detail?: unknown } =
        {};
      try {
        payload = await response.json();
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ApiError(
        response.status,
        payload.code ?? "INTERNAL",
        payload.message ?? `request failed with status ${response.status}`,
        payload.detail,
      );
    }
    return (await response.json()) as T;
  }
}

export function isAbort(err: unknown): boolean {
  return (err as { name?: string } | null)?.name === "AbortError";
}

/**
 * API base URL resolution: an explicit global wins, then a
 * `<meta name="mwpr-api-base">` tag, then same-origin.
 */
export function resolveApiBase(doc: Document): string {
  const fromGlobal = (globalThis as { MWPR_API_BASE?: string }).MWPR_API_BASE;
  if (fromGlobal) return fromGlobal;
  const meta = doc.querySelector('meta[name="mwpr-api-base"]');
  return meta?.getAttribute("content") ?? "";
}
