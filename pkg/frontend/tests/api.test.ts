import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function mockFetch(status: number, body: unknown) {
  const impl = vi.fn(
    async (_input: string | URL | Request, _init?: RequestInit) => jsonResponse(status, body),
  );
  vi.stubGlobal("fetch", impl);
  return impl;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient request shapes", () => {
  it("fetches health from /api/health", async () => {
    const impl = mockFetch(200, { status: "ok", index_size: 3 });
    const health = await new ApiClient().health();
    expect(impl).toHaveBeenCalledWith("/api/health", undefined);
    expect(health.status).toBe("ok");
    expect(health.index_size).toBe(3);
  });

  it("prefixes every path with the configured base", async () => {
    const impl = mockFetch(200, { documents: [] });
    await new ApiClient("http://127.0.0.1:9000").listDocuments();
    expect(impl.mock.calls[0][0]).toBe("http://127.0.0.1:9000/api/documents");
  });

  it("unwraps the document list", async () => {
    const docs = [{ document_id: "d1", file_name: "a.txt", page_count: 1 }];
    mockFetch(200, { documents: docs });
    expect(await new ApiClient().listDocuments()).toEqual(docs);
  });

  it("uploads raw bytes with the name as a query parameter", async () => {
    const impl = mockFetch(200, {
      document_id: "d1",
      page_count: 1,
      chunk_count: 4,
      summary: "s",
    });
    const result = await new ApiClient().uploadDocument("my report.txt", "body text");
    const [url, init] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/documents?name=my%20report.txt");
    expect(init.method).toBe("POST");
    expect((init.headers as Record<string, string>)["content-type"]).toBe(
      "application/octet-stream",
    );
    expect(new TextDecoder().decode(init.body as Uint8Array)).toBe("body text");
    expect(result.chunk_count).toBe(4);
  });

  it("creates a conversation and unwraps its id", async () => {
    const impl = mockFetch(200, { conversation_id: "c-9" });
    expect(await new ApiClient().createConversation()).toBe("c-9");
    expect(impl.mock.calls[0][0]).toBe("/api/conversations");
    expect((impl.mock.calls[0][1] as RequestInit).method).toBe("POST");
  });

  it("unwraps history turns", async () => {
    const turns = [{ turn_index: 0, question: "q", answer: "a" }];
    mockFetch(200, { conversation_id: "c-9", turns });
    expect(await new ApiClient().getHistory("c-9")).toEqual(turns);
  });

  it("posts questions as JSON and returns the answer body", async () => {
    const impl = mockFetch(200, {
      answer: "A grounded answer.",
      insufficient_context: false,
      citations: [],
    });
    const result = await new ApiClient().query("c-9", "what changed?");
    const [url, init] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/conversations/c-9/query");
    expect(JSON.parse(init.body as string)).toEqual({ question: "what changed?" });
    expect(result.answer).toBe("A grounded answer.");
  });

  it("passes the document scope through when given", async () => {
    const impl = mockFetch(200, { answer: "", insufficient_context: true, citations: [] });
    await new ApiClient().query("c-9", "q", "doc-1");
    const init = impl.mock.calls[0][1] as RequestInit;
    expect(JSON.parse(init.body as string)).toEqual({ question: "q", document_id: "doc-1" });
  });

  it("issues DELETE for document removal", async () => {
    const impl = mockFetch(200, { document_id: "d1", deleted: true });
    await new ApiClient().deleteDocument("d1");
    expect(impl.mock.calls[0][0]).toBe("/api/documents/d1");
    expect((impl.mock.calls[0][1] as RequestInit).method).toBe("DELETE");
  });
});

describe("ApiClient error handling", () => {
  it("raises ApiError with the server's code and message", async () => {
    mockFetch(422, { error: { code: "bad_request", message: "document has no text" } });
    const err = await new ApiClient()
      .uploadDocument("empty.txt", "")
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).code).toBe("bad_request");
    expect((err as ApiError).message).toBe("document has no text");
  });

  it("appends the error detail to the message when present", async () => {
    mockFetch(400, {
      error: { code: "bad_request", message: "invalid JSON body", detail: "line 1" },
    });
    const err = (await new ApiClient().query("c", "q").catch((e: unknown) => e)) as ApiError;
    expect(err.message).toBe("invalid JSON body (line 1)");
  });

  it("keeps the sentinel answer body from a 503 query failure", async () => {
    mockFetch(503, {
      answer: "Not enough context.",
      insufficient_context: true,
      citations: [],
      error: { code: "backend_unavailable", message: "generation backend is down" },
    });
    const err = (await new ApiClient().query("c", "q").catch((e: unknown) => e)) as ApiError;
    expect(err.code).toBe("backend_unavailable");
    expect(err.answerBody?.answer).toBe("Not enough context.");
    expect(err.answerBody?.insufficient_context).toBe(true);
  });

  it("falls back to a generic message on an empty error body", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("gateway timeout", { status: 504 })),
    );
    const err = (await new ApiClient().health().catch((e: unknown) => e)) as ApiError;
    expect(err.code).toBe("http_error");
    expect(err.message).toBe("request failed with status 504");
  });
});
