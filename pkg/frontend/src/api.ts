/** Thin typed client for the screening service; never post-processes numbers. */

import {
  ApiError,
  Label,
  LabelsAccepted,
  Progress,
  RankingPage,
  SessionCreated,
  SessionCreateRequest,
  UpdateResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = await res.json();
        detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  createSession(req: SessionCreateRequest): Promise<SessionCreated> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  ranking(sessionId: string, offset = 0, limit = 20): Promise<RankingPage> {
    return this.request(`/sessions/${sessionId}/ranking?offset=${offset}&limit=${limit}`);
  }

  submitLabels(
    sessionId: string,
    labels: Array<{ doc_id: string; label: Label }>,
    idempotencyKey: string,
  ): Promise<LabelsAccepted> {
    return this.request(`/sessions/${sessionId}/labels`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "Idempotency-Key": idempotencyKey,
      },
      body: JSON.stringify(labels),
    });
  }

  update(sessionId: string): Promise<UpdateResponse> {
    return this.request(`/sessions/${sessionId}/update`, { method: "POST" });
  }

  progress(sessionId: string): Promise<Progress> {
    return this.request(`/sessions/${sessionId}/progress`);
  }

  health(): Promise<{ status: string; corpora: string[] }> {
    return this.request("/health");
  }
}
