// Typed client for the expansion session API. One base URL, plain fetch,
// errors surfaced with the server's {code, message, retryable} shape.

export interface ExpandOption {
  phrase: string;
  count: number;
}

export interface ExpandResponse {
  options: ExpandOption[];
  latency_ms: number;
}

export interface TranscriptTurn {
  author: "user" | "partner";
  text: string;
  manual: boolean;
}

export interface Transcript {
  id: string;
  backend: string;
  k: number;
  turns: TranscriptTurn[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    public code: string,
    public retryable: boolean,
    public status: number,
  ) {
    super(message);
  }
}

async function toError(res: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `HTTP ${res.status}`;
  let retryable = res.status >= 500;
  try {
    const body = await res.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      message = body.message ?? message;
      retryable = body.retryable ?? retryable;
    }
  } catch {
    // non-JSON error body; keep the HTTP defaults
  }
  return new ApiError(message, code, retryable, res.status);
}

export class SessionApi {
  constructor(private baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(
    path: string,
    init?: RequestInit & { signal?: AbortSignal },
  ): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!res.ok) {
      throw await toError(res);
    }
    return (await res.json()) as T;
  }

  async createSession(backend?: string): Promise<string> {
    const body = await this.request<{ id: string }>("/sessions", {
      method: "POST",
      body: JSON.stringify(backend ? { backend } : {}),
    });
    return body.id;
  }

  addPartnerTurn(id: string, text: string): Promise<Transcript> {
    return this.request<Transcript>(`/sessions/${id}/turns`, {
      method: "POST",
      body: JSON.stringify({ author: "partner", text }),
    });
  }

  expand(
    id: string,
    abbreviation: string,
    noisy: boolean,
    signal?: AbortSignal,
  ): Promise<ExpandResponse> {
    return this.request<ExpandResponse>(`/sessions/${id}/expand`, {
      method: "POST",
      body: JSON.stringify({ abbreviation, noisy }),
      signal,
    });
  }

  select(id: string, phrase: string): Promise<Transcript> {
    return this.request<Transcript>(`/sessions/${id}/select`, {
      method: "POST",
      body: JSON.stringify({ phrase }),
    });
  }

  getTranscript(id: string): Promise<Transcript> {
    return this.request<Transcript>(`/sessions/${id}`);
  }
}
