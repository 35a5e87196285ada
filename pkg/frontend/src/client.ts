// Thin HTTP client for the dialogue session service.
// Every user action goes through the same utterance endpoint the REPL uses;
// the client never mutates engine state through a side channel.

export interface StateSnapshot {
  session: string;
  qud: string[];
  issues: string[];
  subdialogue: string | null;
  plan_stack: string[];
  query: string;
  result_count: number | null;
  commitments: string[];
  closed: boolean;
}

export interface TurnPayload {
  session: string;
  speaker: string;
  text: string;
  moves: string[];
  state: StateSnapshot;
}

export class HttpError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw new HttpError(response.status, `${response.status} on ${path}`);
    }
    return (await response.json()) as T;
  }

  createSession(): Promise<TurnPayload> {
    return this.request<TurnPayload>("/sessions", { method: "POST" });
  }

  sendUtterance(sessionId: string, text: string): Promise<TurnPayload> {
    return this.request<TurnPayload>(`/sessions/${sessionId}/utterances`, {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  getState(sessionId: string): Promise<StateSnapshot> {
    return this.request<StateSnapshot>(`/sessions/${sessionId}/state`);
  }

  getTranscript(sessionId: string): Promise<{ session: string; turns: unknown[] }> {
    return this.request(`/sessions/${sessionId}/transcript`);
  }
}
