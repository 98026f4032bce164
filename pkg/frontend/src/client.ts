// Thin HTTP client for the session service.  Every call resolves to the
// parsed state (or finish document); HTTP errors become ApiError with the
// server's detail string so the console can show them inline.

import { FinishDoc, SessionState, finishDocSchema, parseSessionState } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface CreatePayload {
  bundle?: string;
  x?: number[][];
  y?: number[];
  groups?: { p: number; groups: number[][] };
  config?: { lambda?: number; k_max?: number; scoring_mode?: string; backward?: boolean };
  family?: string;
}

async function readDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the status line
  }
  return `request failed with status ${res.status}`;
}

export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!res.ok) {
      throw new ApiError(res.status, await readDetail(res));
    }
    return res.json();
  }

  private post(path: string, body?: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body ?? {}),
    });
  }

  async createSession(payload: CreatePayload): Promise<SessionState> {
    return parseSessionState(await this.post("/sessions", payload));
  }

  async getState(id: string): Promise<SessionState> {
    return parseSessionState(await this.request(`/sessions/${id}`));
  }

  async pick(id: string, group: number): Promise<SessionState> {
    return parseSessionState(await this.post(`/sessions/${id}/pick`, { group }));
  }

  async auto(id: string, steps: number): Promise<SessionState> {
    return parseSessionState(await this.post(`/sessions/${id}/auto`, { steps }));
  }

  async finish(id: string): Promise<FinishDoc> {
    return finishDocSchema.parse(await this.post(`/sessions/${id}/finish`));
  }
}
