/**
 * DOM layer: builds the page skeleton, re-renders it from ChatViewState, and
 * wires user events to the API client through the pure state reducers.
 *
 * Rendering always goes through textContent, never innerHTML, so citation
 * text and answers reach the screen exactly as the server sent them.
 */

import type { DocQaApi } from "./api.js";
import {
  ChatViewState,
  TurnView,
  beginQuestion,
  failAnswer,
  initialState,
  resolveAnswer,
  retryTurn,
  setConversation,
  setDocuments,
  toggleCitation,
} from "./state.js";

const TEMPLATE = `
<header class="masthead">
  <h1>Document QA</h1>
  <p class="disclaimer" role="note">Assistive tool, not legal interpretation. Verify answers against the cited sources.</p>
</header>
<div class="layout">
  <aside class="sidebar">
    <h2>Documents</h2>
    <form id="upload-form" class="upload-form">
      <input id="file-input" type="file" aria-label="Document file"
             accept=".pdf,.txt,.md,text/plain,application/pdf">
      <button id="upload-button" type="submit">Upload</button>
    </form>
    <ul id="document-list" class="document-list"></ul>
  </aside>
  <main class="chat">
    <ol id="turn-list" class="turn-list" aria-live="polite"></ol>
    <form id="question-form" class="question-form">
      <input id="question-input" type="text" autocomplete="off"
             placeholder="Ask about the ingested documents" aria-label="Question">
      <button id="send-button" type="submit">Send</button>
    </form>
  </main>
</div>
<div id="toast" class="toast" role="status" hidden></div>
`;

export interface App {
  /** Current view state, exposed for tests and debugging. */
  readonly state: ChatViewState;
  /** Resolves once every scheduled server interaction has settled. */
  whenIdle(): Promise<void>;
}

function messageOf(err: unknown): string {
  if (err instanceof Error) {
    return err.message;
  }
  return String(err);
}

export function createApp(root: HTMLElement, api: DocQaApi): App {
  root.innerHTML = TEMPLATE;
  const doc = root.ownerDocument;
  const pick = <T extends HTMLElement>(selector: string): T => {
    const found = root.querySelector<T>(selector);
    if (!found) {
      throw new Error(`template is missing ${selector}`);
    }
    return found;
  };
  const documentList = pick<HTMLUListElement>("#document-list");
  const uploadForm = pick<HTMLFormElement>("#upload-form");
  const fileInput = pick<HTMLInputElement>("#file-input");
  const turnList = pick<HTMLOListElement>("#turn-list");
  const questionForm = pick<HTMLFormElement>("#question-form");
  const questionInput = pick<HTMLInputElement>("#question-input");
  const sendButton = pick<HTMLButtonElement>("#send-button");
  const toast = pick<HTMLDivElement>("#toast");

  let state = initialState();
  let queue: Promise<void> = Promise.resolve();

  // Server interactions run one after another; the UI only ever has a single
  // query in flight and uploads are quick enough not to need parallelism.
  function schedule(task: () => Promise<void>): void {
    queue = queue.then(() =>
      task().catch((err) => {
        console.error(err);
      }),
    );
  }

  function showToast(message: string, kind: "info" | "error"): void {
    toast.textContent = message;
    toast.className = `toast toast-${kind}`;
    toast.hidden = false;
  }

  function element(tag: string, className: string, text?: string): HTMLElement {
    const node = doc.createElement(tag);
    node.className = className;
    if (text !== undefined) {
      node.textContent = text;
    }
    return node;
  }

  function renderDocuments(): void {
    documentList.textContent = "";
    if (state.documents.length === 0) {
      documentList.appendChild(element("li", "document-empty", "No documents ingested yet."));
      return;
    }
    for (const info of state.documents) {
      const item = element("li", "document");
      item.dataset.id = info.document_id;
      item.appendChild(element("span", "document-name", info.file_name));
      const pages = info.page_count === 1 ? "1 page" : `${info.page_count} pages`;
      item.appendChild(element("span", "document-meta", pages));
      documentList.appendChild(item);
    }
  }

  function renderAnswer(turn: TurnView, turnIndex: number): HTMLElement {
    if (turn.status === "pending") {
      const bubble = element("div", "answer answer-pending");
      const spinner = element("span", "spinner");
      spinner.setAttribute("aria-hidden", "true");
      bubble.appendChild(spinner);
      bubble.appendChild(element("span", "pending-label", "Looking through the documents..."));
      return bubble;
    }
    if (turn.status === "failed") {
      const bubble = element("div", "answer answer-failed");
      bubble.appendChild(
        element("span", "error-message", `The question could not be answered: ${turn.error}`),
      );
      const retry = element("button", "retry-button", "Retry") as HTMLButtonElement;
      retry.type = "button";
      retry.dataset.turn = String(turnIndex);
      bubble.appendChild(retry);
      return bubble;
    }
    const classes = turn.insufficient_context
      ? "answer answer-refusal warning"
      : "answer answer-grounded";
    const bubble = element("div", classes);
    if (turn.insufficient_context) {
      const icon = element("span", "warning-icon", "!");
      icon.setAttribute("aria-hidden", "true");
      bubble.appendChild(icon);
    }
    bubble.appendChild(element("span", "answer-text", turn.answer ?? ""));
    return bubble;
  }

  function metaRow(label: string, value: string, valueClass: string): HTMLElement {
    const row = element("div", "citation-meta-row");
    row.appendChild(element("dt", "citation-meta-label", label));
    row.appendChild(element("dd", valueClass, value));
    return row;
  }

  function renderCitations(turn: TurnView, turnIndex: number): HTMLElement {
    const wrap = element("div", "citations");
    const list = element("ol", "citation-list");
    turn.citations.forEach((citation, citationIndex) => {
      const item = element("li", "citation");
      const bodyId = `turn-${turnIndex}-citation-${citationIndex}`;
      const toggle = element(
        "button",
        "citation-toggle",
        `[${citationIndex + 1}] ${citation.file_name} (p.${citation.page_number})`,
      ) as HTMLButtonElement;
      toggle.type = "button";
      toggle.dataset.turn = String(turnIndex);
      toggle.dataset.citation = String(citationIndex);
      toggle.setAttribute("aria-expanded", String(turn.expanded[citationIndex]));
      toggle.setAttribute("aria-controls", bodyId);
      const body = element("div", "citation-body");
      body.id = bodyId;
      body.hidden = !turn.expanded[citationIndex];
      body.appendChild(element("blockquote", "citation-text", citation.text));
      const meta = element("dl", "citation-meta");
      meta.appendChild(metaRow("File", citation.file_name, "citation-file"));
      meta.appendChild(metaRow("Page", String(citation.page_number), "citation-page"));
      meta.appendChild(metaRow("Score", String(citation.score), "citation-score"));
      body.appendChild(meta);
      item.appendChild(toggle);
      item.appendChild(body);
      list.appendChild(item);
    });
    wrap.appendChild(list);
    return wrap;
  }

  function renderTurns(): void {
    turnList.textContent = "";
    state.turns.forEach((turn, turnIndex) => {
      const item = element("li", "turn");
      item.appendChild(element("div", "turn-question", turn.question));
      item.appendChild(renderAnswer(turn, turnIndex));
      if (turn.status === "answered" && turn.citations.length > 0) {
        item.appendChild(renderCitations(turn, turnIndex));
      }
      turnList.appendChild(item);
    });
  }

  function render(): void {
    renderDocuments();
    renderTurns();
    sendButton.disabled = state.pending;
  }

  function update(next: ChatViewState): void {
    state = next;
    render();
  }

  async function refreshDocuments(): Promise<void> {
    update(setDocuments(state, await api.listDocuments()));
  }

  async function runUpload(file: File): Promise<void> {
    try {
      const data = await file.arrayBuffer();
      const result = await api.uploadDocument(file.name, data);
      await refreshDocuments();
      const pages = result.page_count === 1 ? "1 page" : `${result.page_count} pages`;
      const chunks = result.chunk_count === 1 ? "1 chunk" : `${result.chunk_count} chunks`;
      showToast(`Ingested ${file.name}: ${pages}, ${chunks}.`, "info");
    } catch (err) {
      showToast(`Upload failed: ${messageOf(err)}`, "error");
    }
  }

  async function ensureConversation(): Promise<string> {
    if (state.conversation_id) {
      return state.conversation_id;
    }
    const conversationId = await api.createConversation();
    update(setConversation(state, conversationId));
    return conversationId;
  }

  // Settles the current pending turn, whatever happens on the wire.
  async function dispatchQuery(question: string): Promise<void> {
    try {
      const conversationId = await ensureConversation();
      const result = await api.query(conversationId, question);
      update(resolveAnswer(state, result));
    } catch (err) {
      update(failAnswer(state, messageOf(err)));
    }
  }

  uploadForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    if (!file) {
      showToast("Choose a file to upload first.", "error");
      return;
    }
    schedule(() => runUpload(file));
  });

  questionForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = questionInput.value.trim();
    if (!question || state.pending) {
      return;
    }
    questionInput.value = "";
    schedule(async () => {
      if (state.pending) {
        return;
      }
      update(beginQuestion(state, question));
      await dispatchQuery(question);
    });
  });

  turnList.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const toggle = target.closest<HTMLButtonElement>("button.citation-toggle");
    if (toggle) {
      update(toggleCitation(state, Number(toggle.dataset.turn), Number(toggle.dataset.citation)));
      return;
    }
    const retry = target.closest<HTMLButtonElement>("button.retry-button");
    if (retry && !state.pending) {
      const turnIndex = Number(retry.dataset.turn);
      schedule(async () => {
        if (state.pending || state.turns[turnIndex]?.status !== "failed") {
          return;
        }
        const question = state.turns[turnIndex].question;
        update(retryTurn(state, turnIndex));
        await dispatchQuery(question);
      });
    }
  });

  render();
  schedule(async () => {
    try {
      await refreshDocuments();
    } catch (err) {
      showToast(`Could not reach the service: ${messageOf(err)}`, "error");
    }
  });

  return {
    get state() {
      return state;
    },
    whenIdle() {
      return queue;
    },
  };
}
