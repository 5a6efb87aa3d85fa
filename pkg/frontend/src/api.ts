// Thin typed client over fetch. Errors surface as ServiceError carrying
// the service's stable machine code so the controller can react (e.g.
// WRONG_STATE means "refetch the step").

import type {
  FaqPayload,
  ModelView,
  RegisterResponse,
  SessionResponse,
  StepEnvelope,
  SubmitEnvelope,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export class TutorClient {
  token: string | null = null;

  constructor(readonly baseUrl: string = "") {}

  async register(name: string): Promise<RegisterResponse> {
    const body = await this.request<RegisterResponse>("POST", "/api/learners", { name });
    this.token = body.token;
    return body;
  }

  openSession(): Promise<SessionResponse> {
    return this.request("POST", "/api/sessions");
  }

  step(sessionId: string): Promise<StepEnvelope> {
    return this.request("GET", `/api/sessions/${sessionId}/step`);
  }

  submitResponses(sessionId: string, responses: Record<string, number>): Promise<SubmitEnvelope> {
    return this.request("POST", `/api/sessions/${sessionId}/submit`, { responses });
  }

  submitAnswers(sessionId: string, answers: Record<string, number>): Promise<SubmitEnvelope> {
    return this.request("POST", `/api/sessions/${sessionId}/submit`, { answers });
  }

  model(learnerId: string): Promise<ModelView> {
    return this.request("GET", `/api/learners/${learnerId}/model`);
  }

  faq(): Promise<FaqPayload> {
    return this.request("GET", "/api/faq");
  }

  private async request<T>(method: string, path: string, payload?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    if (!response.ok) {
      let code = "HTTP_ERROR";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(response.status, code, message);
    }
    return (await response.json()) as T;
  }
}
