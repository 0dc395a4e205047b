import type { ActionDoc, PlanResponse, SessionHandle, Snapshot, SpecDoc } from "./types.js";

export class GatewayError extends Error {
  constructor(message: string, readonly status: number, readonly path?: string) {
    super(message);
    this.name = "GatewayError";
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const err = (body as { error?: { message?: string; path?: string } }).error;
    throw new GatewayError(err?.message ?? response.statusText, response.status, err?.path);
  }
  return body as T;
}

export class GatewayClient {
  constructor(readonly baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parseOrThrow<T>(response);
  }

  async createSession(spec: SpecDoc): Promise<SessionHandle> {
    return this.post<SessionHandle>("/sessions", spec);
  }

  async state(sessionId: string): Promise<Snapshot> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/state`);
    return parseOrThrow<Snapshot>(response);
  }

  async applyAction(sessionId: string, action: ActionDoc): Promise<Snapshot> {
    return this.post<Snapshot>(`/sessions/${sessionId}/actions`, action);
  }

  async requestPlan(sessionId: string, polyline: [number, number][],
                    toleranceM?: number): Promise<PlanResponse> {
    const body: Record<string, unknown> = { polyline };
    if (toleranceM !== undefined) body.tolerance_m = toleranceM;
    return this.post<PlanResponse>(`/sessions/${sessionId}/plan`, body);
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl.replace(/^http/, "ws")}/sessions/${sessionId}/events`;
  }
}
