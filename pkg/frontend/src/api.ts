/**
 * Typed client for the document QA service JSON API.
 *
 * Every server interaction in the UI goes through this module; the shapes
 * below mirror the service's published wire formats field for field.
 */

export interface DocumentInfo {
  document_id: string;
  file_name: string;
  page_count: number;
  summary: string;
  ingested_at: string;
  summary_is_fallback: boolean;
}

export interface IngestResult {
  document_id: string;
  page_count: number;
  chunk_count: number;
  summary: string;
}

export interface Citation {
  chunk_id: string;
  file_name: string;
  page_number: number;
  text: string;
  score: number;
}

export interface QueryResult {
  answer: string;
  insufficient_context: boolean;
  citations: Citation[];
  trace?: unknown;
  error?: { code: string; message: string };
}

export interface HistoryTurn {
  turn_index: number;
  question: string;
  answer: string;
  insufficient_context: boolean;
  citation_chunk_ids: string[];
  created_at: string;
}

export interface Health {
  status: "ok" | "degraded";
  embed_backend: boolean;
  generate_backend: boolean;
  rerank_backend: boolean;
  index_size: number;
}

/** Error raised for any non-2xx response, carrying the server's error body. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  /** Present on query failures, where the server still returns an answer body. */
  readonly answerBody?: QueryResult;

  constructor(status: number, code: string, message: string, answerBody?: QueryResult) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.answerBody = answerBody;
  }
}

/** The surface the view layer depends on; tests substitute stubs for it. */
export interface DocQaApi {
  health(): Promise<Health>;
  listDocuments(): Promise<DocumentInfo[]>;
  uploadDocument(name: string, data: ArrayBuffer | Uint8Array | string): Promise<IngestResult>;
  deleteDocument(documentId: string): Promise<void>;
  createConversation(): Promise<string>;
  getHistory(conversationId: string): Promise<HistoryTurn[]>;
  query(conversationId: string, question: string, documentId?: string): Promise<QueryResult>;
}

interface ErrorBody {
  error?: { code?: string; message?: string; detail?: string };
}

function errorFrom(status: number, body: unknown): ApiError {
  const err = (body as ErrorBody)?.error;
  const code = err?.code ?? "http_error";
  let message = err?.message ?? `request failed with status ${status}`;
  if (err?.detail) {
    message = `${message} (${err.detail})`;
  }
  const answerBody =
    body !== null && typeof body === "object" && "answer" in (body as object)
      ? (body as QueryResult)
      : undefined;
  return new ApiError(status, code, message, answerBody);
}

export class ApiClient implements DocQaApi {
  constructor(private readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await fetch(this.base + path, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw errorFrom(response.status, body);
    }
    return body;
  }

  async health(): Promise<Health> {
    return (await this.request("/api/health")) as Health;
  }

  async listDocuments(): Promise<DocumentInfo[]> {
    const body = (await this.request("/api/documents")) as { documents: DocumentInfo[] };
    return body.documents;
  }

  async uploadDocument(
    name: string,
    data: ArrayBuffer | Uint8Array | string,
  ): Promise<IngestResult> {
    const payload = typeof data === "string" ? new TextEncoder().encode(data) : data;
    const path = `/api/documents?name=${encodeURIComponent(name)}`;
    return (await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body: payload as BodyInit,
    })) as IngestResult;
  }

  async deleteDocument(documentId: string): Promise<void> {
    await this.request(`/api/documents/${encodeURIComponent(documentId)}`, {
      method: "DELETE",
    });
  }

  async createConversation(): Promise<string> {
    const body = (await this.request("/api/conversations", { method: "POST" })) as {
      conversation_id: string;
    };
    return body.conversation_id;
  }

  async getHistory(conversationId: string): Promise<HistoryTurn[]> {
    const body = (await this.request(
      `/api/conversations/${encodeURIComponent(conversationId)}`,
    )) as { turns: HistoryTurn[] };
    return body.turns;
  }

  async query(
    conversationId: string,
    question: string,
    documentId?: string,
  ): Promise<QueryResult> {
    const payload: Record<string, unknown> = { question };
    if (documentId !== undefined) {
      payload.document_id = documentId;
    }
    return (await this.request(
      `/api/conversations/${encodeURIComponent(conversationId)}/query`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload),
      },
    )) as QueryResult;
  }
}
