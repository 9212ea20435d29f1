import type { ExpertRequest, ExpertResponse, RequestStatus, Verdict } from "./types";

/** Error carrying the HTTP status so callers can branch on 409 vs 410. */
export class ApiError extends Error {
  readonly status: number;
  readonly body: unknown;

  constructor(status: number, message: string, body: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.body = body;
  }

  /** Another expert answered or claimed first. */
  get isConflict(): boolean {
    return this.status === 409;
  }

  /** The request expired before anyone answered. */
  get isExpired(): boolean {
    return this.status === 410;
  }
}

async function parseBody(res: Response): Promise<unknown> {
  try {
    return await res.json();
  } catch {
    return null;
  }
}

function messageFrom(body: unknown, fallback: string): string {
  if (body && typeof body === "object" && "error" in body) {
    const msg = (body as { error: unknown }).error;
    if (typeof msg === "string") return msg;
  }
  return fallback;
}

export class ExpertApi {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, payload?: unknown): Promise<T> {
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}${path}`, {
        method,
        headers: payload !== undefined ? { "Content-Type": "application/json" } : undefined,
        body: payload !== undefined ? JSON.stringify(payload) : undefined,
      });
    } catch (err) {
      throw new ApiError(0, `expert service unreachable: ${String(err)}`);
    }
    const body = await parseBody(res);
    if (!res.ok) {
      throw new ApiError(res.status, messageFrom(body, `HTTP ${res.status} on ${path}`), body);
    }
    return body as T;
  }

  listRequests(status?: RequestStatus): Promise<ExpertRequest[]> {
    const query = status ? `?status=${status}` : "";
    return this.request<{ requests: ExpertRequest[] }>("GET", `/api/requests${query}`).then(
      (body) => body.requests,
    );
  }

  getRequest(id: string): Promise<ExpertRequest> {
    return this.request<ExpertRequest>("GET", `/api/requests/${id}`);
  }

  claim(id: string, expertId: string): Promise<ExpertRequest> {
    return this.request<ExpertRequest>("POST", `/api/requests/${id}/claim`, {
      expert_id: expertId,
    });
  }

  respond(id: string, verdict: Verdict, text: string, expertId: string): Promise<ExpertResponse> {
    return this.request<ExpertResponse>("POST", `/api/requests/${id}/response`, {
      verdict,
      text,
      expert_id: expertId,
    });
  }

  eventsUrl(): string {
    return `${this.baseUrl}/api/events`;
  }
}

/**
 * Client-side response validation, mirrored from the server's rules so the
 * form can refuse a submission before the network round trip.
 */
export function validateResponse(verdict: string, text: string): string | null {
  if (verdict !== "approve" && verdict !== "reject" && verdict !== "free-text") {
    return "pick a verdict";
  }
  if (verdict === "free-text" && text.trim() === "") {
    return "a free-text answer needs text";
  }
  return null;
}
