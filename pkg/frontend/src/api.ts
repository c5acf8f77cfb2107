// Typed client for the lexrag service JSON API. The console performs no
// legal computation of its own; everything comes from these endpoints.

export interface Hit {
  rank: number;
  score: number;
  ref: string | null;
  text: string;
  entry_id: string;
}

export interface QueryResponse {
  schema_version: number;
  answer: string;
  citations: string[];
  hits: Hit[];
  model_id: string;
  latency_ms: number;
}

export interface CorpusSegment {
  schema_version: number;
  ref: string;
  display: string;
  level: string;
  text: string;
  rendered: string;
}

export interface HealthResponse {
  schema_version: number;
  status: string;
  kb_loaded: boolean;
  entries: number;
}

export interface IndexResponse {
  schema_version: number;
  entries: number;
  dim: number;
  embedder_id: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function parseDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") return body.detail;
    if (body?.detail !== undefined) return JSON.stringify(body.detail);
    return JSON.stringify(body);
  } catch {
    return response.statusText || "request failed";
  }
}

export class ApiClient {
  constructor(public baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    return (await response.json()) as T;
  }

  query(text: string, k: number, systemPromptId?: string,
        signal?: AbortSignal): Promise<QueryResponse> {
    const body: Record<string, unknown> = { text, k };
    if (systemPromptId) body.system_prompt_id = systemPromptId;
    return this.request<QueryResponse>("/api/query", {
      method: "POST",
      body: JSON.stringify(body),
      signal,
    });
  }

  corpus(ref: string): Promise<CorpusSegment> {
    return this.request<CorpusSegment>(`/api/corpus/${ref}`);
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/api/health");
  }

  indexPath(corpusPath: string): Promise<IndexResponse> {
    return this.request<IndexResponse>("/api/index", {
      method: "POST",
      body: JSON.stringify({ corpus_path: corpusPath }),
    });
  }
}
