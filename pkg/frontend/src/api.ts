import type {
  ClickResponse,
  ConstraintsResponse,
  FeedName,
  FeedsResponse,
  HistoryResponse,
  SessionResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
  } catch (err) {
    // network failure, no response at all
    throw new ApiError(0, "network", String(err));
  }
  if (!res.ok) {
    let code = "internal";
    let message = `HTTP ${res.status}`;
    try {
      const body = await res.json();
      if (body && body.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body, keep the fallback
    }
    throw new ApiError(res.status, code, message);
  }
  return (await res.json()) as T;
}

export interface CreateSessionBody {
  seed?: number;
  lower_liberal?: number;
  upper_liberal?: number;
}

export function createSession(body: CreateSessionBody = {}): Promise<SessionResponse> {
  return request<SessionResponse>("/sessions", {
    method: "POST",
    body: JSON.stringify(body),
  });
}

export function getFeeds(sessionId: string): Promise<FeedsResponse> {
  return request<FeedsResponse>(`/sessions/${encodeURIComponent(sessionId)}/feeds`);
}

export function postClick(
  sessionId: string,
  feed: FeedName,
  articleId: string,
): Promise<ClickResponse> {
  return request<ClickResponse>(
    `/sessions/${encodeURIComponent(sessionId)}/clicks`,
    {
      method: "POST",
      body: JSON.stringify({ feed, article_id: articleId }),
    },
  );
}

export function putConstraints(
  sessionId: string,
  lower: number,
  upper: number,
): Promise<ConstraintsResponse> {
  return request<ConstraintsResponse>(
    `/sessions/${encodeURIComponent(sessionId)}/constraints`,
    {
      method: "PUT",
      body: JSON.stringify({ lower_liberal: lower, upper_liberal: upper }),
    },
  );
}

export function getHistory(sessionId: string): Promise<HistoryResponse> {
  return request<HistoryResponse>(`/sessions/${encodeURIComponent(sessionId)}/history`);
}
