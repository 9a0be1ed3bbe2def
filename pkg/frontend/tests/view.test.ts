import { describe, expect, it } from "vitest";

import type {
  DocQaApi,
  DocumentInfo,
  Health,
  HistoryTurn,
  IngestResult,
  QueryResult,
} from "../src/api.js";
import { ApiError } from "../src/api.js";
import { App, createApp } from "../src/view.js";

function docInfo(name: string, pages = 2): DocumentInfo {
  return {
    document_id: `doc-${name}`,
    file_name: name,
    page_count: pages,
    summary: "a summary",
    ingested_at: "2026-01-01T00:00:00Z",
    summary_is_fallback: false,
  };
}

function answered(answer: string, citations: QueryResult["citations"] = []): QueryResult {
  return { answer, insufficient_context: false, citations };
}

/** In-memory server double; tests override the per-call behavior as needed. */
class StubApi implements DocQaApi {
  documents: DocumentInfo[] = [];
  conversations = 0;
  queryImpl: (question: string) => Promise<QueryResult> = async () => answered("stub answer");
  uploadImpl: ((name: string) => Promise<IngestResult>) | null = null;

  async health(): Promise<Health> {
    return {
      status: "ok",
      embed_backend: true,
      generate_backend: true,
      rerank_backend: true,
      index_size: 0,
    };
  }

  async listDocuments(): Promise<DocumentInfo[]> {
    return [...this.documents];
  }

  async uploadDocument(name: string): Promise<IngestResult> {
    if (this.uploadImpl) {
      return this.uploadImpl(name);
    }
    if (!this.documents.some((d) => d.file_name === name)) {
      this.documents.push(docInfo(name));
    }
    return { document_id: `doc-${name}`, page_count: 2, chunk_count: 7, summary: "a summary" };
  }

  async deleteDocument(): Promise<void> {}

  async createConversation(): Promise<string> {
    this.conversations += 1;
    return `conv-${this.conversations}`;
  }

  async getHistory(): Promise<HistoryTurn[]> {
    return [];
  }

  async query(_conversationId: string, question: string): Promise<QueryResult> {
    return this.queryImpl(question);
  }
}

function mount(api: DocQaApi): { root: HTMLElement; app: App } {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  return { root, app: createApp(root, api) };
}

function submit(root: HTMLElement, selector: string): void {
  const form = root.querySelector<HTMLFormElement>(selector);
  form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

function selectFile(root: HTMLElement, file: File): void {
  const input = root.querySelector<HTMLInputElement>("#file-input");
  Object.defineProperty(input, "files", { value: [file], configurable: true });
}

async function uploadFile(root: HTMLElement, app: App, file: File): Promise<void> {
  selectFile(root, file);
  submit(root, "#upload-form");
  await app.whenIdle();
}

async function ask(root: HTMLElement, app: App, question: string): Promise<void> {
  const input = root.querySelector<HTMLInputElement>("#question-input");
  input!.value = question;
  submit(root, "#question-form");
  await app.whenIdle();
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (reason: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

function textOf(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  expect(node, `expected an element matching ${selector}`).not.toBeNull();
  return node!.textContent ?? "";
}

describe("page chrome", () => {
  it("shows the title and the disclaimer banner", async () => {
    const { root, app } = mount(new StubApi());
    await app.whenIdle();
    expect(textOf(root, "h1")).toBe("Document QA");
    expect(textOf(root, ".disclaimer")).toContain("Assistive tool, not legal interpretation");
  });

  it("lists already-ingested documents on startup", async () => {
    const api = new StubApi();
    api.documents = [docInfo("contract.pdf", 12), docInfo("appendix.txt", 1)];
    const { root, app } = mount(api);
    await app.whenIdle();
    const rows = root.querySelectorAll(".document");
    expect(rows).toHaveLength(2);
    expect(rows[0].textContent).toContain("contract.pdf");
    expect(rows[0].textContent).toContain("12 pages");
    expect(rows[1].textContent).toContain("1 page");
  });
});

describe("upload_document", () => {
  it("adds the document to the sidebar and reports page and chunk counts", async () => {
    const api = new StubApi();
    const { root, app } = mount(api);
    await uploadFile(root, app, new File(["solar rebates"], "policy.txt"));
    expect(textOf(root, ".document")).toContain("policy.txt");
    const toast = root.querySelector("#toast") as HTMLElement;
    expect(toast.hidden).toBe(false);
    expect(toast.className).toContain("toast-info");
    expect(toast.textContent).toContain("2 pages");
    expect(toast.textContent).toContain("7 chunks");
  });

  it("surfaces a rejected upload as an error toast", async () => {
    const api = new StubApi();
    api.uploadImpl = async () => {
      throw new ApiError(422, "bad_request", "document has no extractable text");
    };
    const { root, app } = mount(api);
    await uploadFile(root, app, new File([""], "empty.txt"));
    const toast = root.querySelector("#toast") as HTMLElement;
    expect(toast.className).toContain("toast-error");
    expect(toast.textContent).toContain("document has no extractable text");
    expect(root.querySelectorAll(".document")).toHaveLength(0);
  });

  it("asks for a file when none is selected", async () => {
    const { root, app } = mount(new StubApi());
    submit(root, "#upload-form");
    await app.whenIdle();
    const toast = root.querySelector("#toast") as HTMLElement;
    expect(toast.className).toContain("toast-error");
    expect(toast.textContent).toContain("Choose a file");
  });

  it("does not duplicate the sidebar entry when the same file is uploaded twice", async () => {
    const api = new StubApi();
    const { root, app } = mount(api);
    const file = new File(["solar rebates"], "policy.txt");
    await uploadFile(root, app, file);
    await uploadFile(root, app, file);
    expect(root.querySelectorAll(".document")).toHaveLength(1);
  });
});

describe("send_question", () => {
  it("shows a pending bubble with a spinner and disables send while in flight", async () => {
    const api = new StubApi();
    const gate = deferred<QueryResult>();
    api.queryImpl = () => gate.promise;
    const { root, app } = mount(api);
    const input = root.querySelector<HTMLInputElement>("#question-input")!;
    input.value = "What is the rebate?";
    submit(root, "#question-form");
    await flush();
    expect(root.querySelector(".answer-pending")).not.toBeNull();
    expect(root.querySelector(".spinner")).not.toBeNull();
    expect(root.querySelector<HTMLButtonElement>("#send-button")!.disabled).toBe(true);
    gate.resolve(answered("30 percent."));
    await app.whenIdle();
    expect(root.querySelector(".answer-pending")).toBeNull();
    expect(textOf(root, ".answer-text")).toBe("30 percent.");
    expect(root.querySelector<HTMLButtonElement>("#send-button")!.disabled).toBe(false);
  });

  it("creates one conversation automatically for the whole session", async () => {
    const api = new StubApi();
    const { root, app } = mount(api);
    await ask(root, app, "first");
    await ask(root, app, "second");
    expect(api.conversations).toBe(1);
  });

  it("renders collapsed citation rows under a grounded answer", async () => {
    const api = new StubApi();
    api.queryImpl = async () =>
      answered("See the excerpts.", [
        { chunk_id: "c1", file_name: "a.txt", page_number: 1, text: "first excerpt", score: 0.9 },
        { chunk_id: "c2", file_name: "b.txt", page_number: 4, text: "second excerpt", score: 0.4 },
      ]);
    const { root, app } = mount(api);
    await ask(root, app, "where?");
    const toggles = root.querySelectorAll<HTMLButtonElement>(".citation-toggle");
    expect(toggles).toHaveLength(2);
    for (const toggle of toggles) {
      expect(toggle.getAttribute("aria-expanded")).toBe("false");
    }
    for (const body of root.querySelectorAll<HTMLElement>(".citation-body")) {
      expect(body.hidden).toBe(true);
    }
  });

  it("styles a refusal distinctly and shows the sentinel text", async () => {
    const api = new StubApi();
    api.queryImpl = async () => ({
      answer: "Not enough context.",
      insufficient_context: true,
      citations: [],
    });
    const { root, app } = mount(api);
    await ask(root, app, "what about asteroids?");
    const bubble = root.querySelector(".answer-refusal") as HTMLElement;
    expect(bubble).not.toBeNull();
    expect(bubble.className).toContain("warning");
    expect(bubble.querySelector(".answer-text")!.textContent).toBe("Not enough context.");
    expect(root.querySelector(".answer-grounded")).toBeNull();
  });

  it("keeps prior turns visible when a follow-up arrives", async () => {
    const api = new StubApi();
    const { root, app } = mount(api);
    await ask(root, app, "What is the rebate?");
    await ask(root, app, "Does it apply to batteries too?");
    const questions = [...root.querySelectorAll(".turn-question")].map((n) => n.textContent);
    expect(questions).toEqual(["What is the rebate?", "Does it apply to batteries too?"]);
    expect(root.querySelectorAll(".answer-grounded")).toHaveLength(2);
  });

  it("ignores an empty question", async () => {
    const { root, app } = mount(new StubApi());
    await ask(root, app, "   ");
    expect(root.querySelectorAll(".turn")).toHaveLength(0);
  });

  it("drops a second question submitted while one is pending", async () => {
    const api = new StubApi();
    const gate = deferred<QueryResult>();
    api.queryImpl = () => gate.promise;
    const { root, app } = mount(api);
    const input = root.querySelector<HTMLInputElement>("#question-input")!;
    input.value = "first";
    submit(root, "#question-form");
    await flush();
    input.value = "second";
    submit(root, "#question-form");
    gate.resolve(answered("done"));
    await app.whenIdle();
    expect(root.querySelectorAll(".turn")).toHaveLength(1);
  });

  it("offers a retry after a backend failure and completes it", async () => {
    const api = new StubApi();
    api.queryImpl = async () => {
      throw new ApiError(503, "backend_unavailable", "generation backend is down");
    };
    const { root, app } = mount(api);
    await ask(root, app, "What is the rebate?");
    const failedBubble = root.querySelector(".answer-failed") as HTMLElement;
    expect(failedBubble).not.toBeNull();
    expect(failedBubble.textContent).toContain("generation backend is down");
    expect(app.state.turns[0].status).toBe("failed");
    expect(root.querySelector(".answer-grounded")).toBeNull();

    api.queryImpl = async () => answered("Recovered answer.");
    root.querySelector<HTMLButtonElement>(".retry-button")!.click();
    await app.whenIdle();
    expect(root.querySelector(".answer-failed")).toBeNull();
    expect(textOf(root, ".answer-text")).toBe("Recovered answer.");
    expect(root.querySelectorAll(".turn")).toHaveLength(1);
    expect(textOf(root, ".turn-question")).toBe("What is the rebate?");
  });
});

describe("toggle_citation", () => {
  const payloadText = "  The rebate is 30 percent,\n  applied at installation. ";

  async function mountWithCitations() {
    const api = new StubApi();
    api.queryImpl = async () =>
      answered("See sources.", [
        { chunk_id: "c1", file_name: "policy.txt", page_number: 3, text: payloadText, score: 2.5 },
        { chunk_id: "c2", file_name: "annex.pdf", page_number: 11, text: "other text", score: 1 },
      ]);
    const { root, app } = mount(api);
    await ask(root, app, "how much?");
    return { root, app };
  }

  it("expands to the exact payload text, file, page, and score", async () => {
    const { root } = await mountWithCitations();
    const toggle = root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0];
    toggle.click();
    const body = root.querySelectorAll<HTMLElement>(".citation-body")[0];
    expect(body.hidden).toBe(false);
    expect(body.querySelector(".citation-text")!.textContent).toBe(payloadText);
    expect(body.querySelector(".citation-file")!.textContent).toBe("policy.txt");
    expect(body.querySelector(".citation-page")!.textContent).toBe("3");
    expect(body.querySelector(".citation-score")!.textContent).toBe("2.5");
    expect(
      root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0].getAttribute("aria-expanded"),
    ).toBe("true");
  });

  it("collapses again on a second activation", async () => {
    const { root } = await mountWithCitations();
    root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0].click();
    root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0].click();
    const body = root.querySelectorAll<HTMLElement>(".citation-body")[0];
    expect(body.hidden).toBe(true);
  });

  it("leaves the other citation alone", async () => {
    const { root } = await mountWithCitations();
    root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0].click();
    let bodies = root.querySelectorAll<HTMLElement>(".citation-body");
    expect(bodies[0].hidden).toBe(false);
    expect(bodies[1].hidden).toBe(true);
    root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[1].click();
    bodies = root.querySelectorAll<HTMLElement>(".citation-body");
    expect(bodies[0].hidden).toBe(false);
    expect(bodies[1].hidden).toBe(false);
  });

  it("uses real buttons wired for assistive tech", async () => {
    const { root } = await mountWithCitations();
    const toggle = root.querySelectorAll<HTMLButtonElement>(".citation-toggle")[0];
    expect(toggle.tagName).toBe("BUTTON");
    expect(toggle.type).toBe("button");
    expect(toggle.getAttribute("aria-controls")).toBe(
      root.querySelectorAll(".citation-body")[0].id,
    );
  });
});
