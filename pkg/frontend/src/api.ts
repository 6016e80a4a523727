import type {
  AnswerResponse,
  ApiErrorBody,
  SessionCreated,
  SessionSnapshot,
  SpecInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Error carrying the service's {error, message} body plus the HTTP status. */
export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

/** Thrown when the service cannot be reached at all (offline banner case). */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
    this.name = "OfflineError";
  }
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!resp.ok) {
      let code = "http_error";
      let message = `${resp.status}`;
      try {
        const parsed = (await resp.json()) as ApiErrorBody;
        code = parsed.error ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  listSpecs(): Promise<SpecInfo[]> {
    return this.request<SpecInfo[]>("GET", "/specs");
  }

  createSession(spec: string, mode = "human-oracle", seed = 0): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", "/sessions", { spec, mode, seed });
  }

  postAnswer(sessionId: string, outcome: string | null, round: number): Promise<AnswerResponse> {
    const body: Record<string, unknown> = { round };
    if (outcome !== null) {
      body.outcome = outcome;
    }
    return this.request<AnswerResponse>("POST", `/sessions/${sessionId}/answers`, body);
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>("GET", `/sessions/${sessionId}`);
  }
}
