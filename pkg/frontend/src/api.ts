/** Thin fetch client for the chat service; the UI performs no reasoning. */

import type { SessionInfo, TurnResponse } from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    public readonly status: number | null,
    public readonly retryable: boolean,
  ) {
    super(message);
  }
}

export class SessionClosedError extends ServiceError {
  constructor() {
    super("session is closed", 409, false);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      headers: { "content-type": "application/json" },
      ...init,
    });
  } catch (err) {
    throw new ServiceError(`service unreachable: ${String(err)}`, null, true);
  }
  if (response.status === 409) {
    throw new SessionClosedError();
  }
  if (!response.ok) {
    const retryable = response.status === 503 || response.status >= 500;
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = `${detail}: ${body.detail}`;
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ServiceError(detail, response.status, retryable);
  }
  return (await response.json()) as T;
}

export class ServiceClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  health(): Promise<{ status: string }> {
    return request(this.url("/v1/health"));
  }

  createSession(task: string, backend: string, seed?: number): Promise<SessionInfo> {
    return request(this.url("/v1/sessions"), {
      method: "POST",
      body: JSON.stringify(seed === undefined ? { task, backend } : { task, backend, seed }),
    });
  }

  postMessage(sessionId: string, text: string): Promise<TurnResponse> {
    return request(this.url(`/v1/sessions/${sessionId}/messages`), {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  transcript(sessionId: string): Promise<{ turns: unknown[] }> {
    return request(this.url(`/v1/sessions/${sessionId}/transcript`));
  }
}
