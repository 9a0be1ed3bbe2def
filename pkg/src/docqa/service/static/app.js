// src/api.ts
var ApiError = class extends Error {
  constructor(status, code, message, answerBody) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.answerBody = answerBody;
  }
};
function errorFrom(status, body) {
  const err = body?.error;
  const code = err?.code ?? "http_error";
  let message = err?.message ?? `request failed with status ${status}`;
  if (err?.detail) {
    message = `${message} (${err.detail})`;
  }
  const answerBody = body !== null && typeof body === "object" && "answer" in body ? body : void 0;
  return new ApiError(status, code, message, answerBody);
}
var ApiClient = class {
  constructor(base = "") {
    this.base = base;
  }
  async request(path, init) {
    const response = await fetch(this.base + path, init);
    let body = null;
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
  async health() {
    return await this.request("/api/health");
  }
  async listDocuments() {
    const body = await this.request("/api/documents");
    return body.documents;
  }
  async uploadDocument(name, data) {
    const payload = typeof data === "string" ? new TextEncoder().encode(data) : data;
    const path = `/api/documents?name=${encodeURIComponent(name)}`;
    return await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body: payload
    });
  }
  async deleteDocument(documentId) {
    await this.request(`/api/documents/${encodeURIComponent(documentId)}`, {
      method: "DELETE"
    });
  }
  async createConversation() {
    const body = await this.request("/api/conversations", { method: "POST" });
    return body.conversation_id;
  }
  async getHistory(conversationId) {
    const body = await this.request(
      `/api/conversations/${encodeURIComponent(conversationId)}`
    );
    return body.turns;
  }
  async query(conversationId, question, documentId) {
    const payload = { question };
    if (documentId !== void 0) {
      payload.document_id = documentId;
    }
    return await this.request(
      `/api/conversations/${encodeURIComponent(conversationId)}/query`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload)
      }
    );
  }
};

// src/state.ts
function initialState() {
  return { conversation_id: null, turns: [], pending: false, documents: [] };
}
function setConversation(state, conversationId) {
  return { ...state, conversation_id: conversationId };
}
function setDocuments(state, documents) {
  return { ...state, documents: [...documents] };
}
function beginQuestion(state, question) {
  if (state.pending) {
    throw new Error("a query is already in flight");
  }
  const turn = {
    question,
    answer: null,
    insufficient_context: false,
    citations: [],
    expanded: [],
    status: "pending",
    error: null
  };
  return { ...state, turns: [...state.turns, turn], pending: true };
}
function pendingIndex(state) {
  for (let i = state.turns.length - 1; i >= 0; i--) {
    if (state.turns[i].status === "pending") {
      return i;
    }
  }
  throw new Error("no pending turn to settle");
}
function resolveAnswer(state, result) {
  const index = pendingIndex(state);
  const turns = state.turns.slice();
  turns[index] = {
    ...turns[index],
    answer: result.answer,
    insufficient_context: result.insufficient_context,
    citations: result.citations,
    expanded: result.citations.map(() => false),
    status: "answered",
    error: null
  };
  return { ...state, turns, pending: false };
}
function failAnswer(state, message) {
  const index = pendingIndex(state);
  const turns = state.turns.slice();
  turns[index] = { ...turns[index], status: "failed", error: message };
  return { ...state, turns, pending: false };
}
function retryTurn(state, turnIndex) {
  if (state.pending) {
    throw new Error("a query is already in flight");
  }
  const turn = state.turns[turnIndex];
  if (!turn || turn.status !== "failed") {
    throw new Error(`turn ${turnIndex} is not in a failed state`);
  }
  const turns = state.turns.slice();
  turns[turnIndex] = { ...turn, status: "pending", error: null };
  return { ...state, turns, pending: true };
}
function toggleCitation(state, turnIndex, citationIndex) {
  const turn = state.turns[turnIndex];
  if (!turn) {
    throw new Error(`no turn at index ${turnIndex}`);
  }
  if (citationIndex < 0 || citationIndex >= turn.expanded.length) {
    throw new Error(`no citation at index ${citationIndex}`);
  }
  const expanded = turn.expanded.slice();
  expanded[citationIndex] = !expanded[citationIndex];
  const turns = state.turns.slice();
  turns[turnIndex] = { ...turn, expanded };
  return { ...state, turns };
}

// src/view.ts
var TEMPLATE = `
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
function messageOf(err) {
  if (err instanceof Error) {
    return err.message;
  }
  return String(err);
}
function createApp(root2, api) {
  root2.innerHTML = TEMPLATE;
  const doc = root2.ownerDocument;
  const pick = (selector) => {
    const found = root2.querySelector(selector);
    if (!found) {
      throw new Error(`template is missing ${selector}`);
    }
    return found;
  };
  const documentList = pick("#document-list");
  const uploadForm = pick("#upload-form");
  const fileInput = pick("#file-input");
  const turnList = pick("#turn-list");
  const questionForm = pick("#question-form");
  const questionInput = pick("#question-input");
  const sendButton = pick("#send-button");
  const toast = pick("#toast");
  let state = initialState();
  let queue = Promise.resolve();
  function schedule(task) {
    queue = queue.then(
      () => task().catch((err) => {
        console.error(err);
      })
    );
  }
  function showToast(message, kind) {
    toast.textContent = message;
    toast.className = `toast toast-${kind}`;
    toast.hidden = false;
  }
  function element(tag, className, text) {
    const node = doc.createElement(tag);
    node.className = className;
    if (text !== void 0) {
      node.textContent = text;
    }
    return node;
  }
  function renderDocuments() {
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
  function renderAnswer(turn, turnIndex) {
    if (turn.status === "pending") {
      const bubble2 = element("div", "answer answer-pending");
      const spinner = element("span", "spinner");
      spinner.setAttribute("aria-hidden", "true");
      bubble2.appendChild(spinner);
      bubble2.appendChild(element("span", "pending-label", "Looking through the documents..."));
      return bubble2;
    }
    if (turn.status === "failed") {
      const bubble2 = element("div", "answer answer-failed");
      bubble2.appendChild(
        element("span", "error-message", `The question could not be answered: ${turn.error}`)
      );
      const retry = element("button", "retry-button", "Retry");
      retry.type = "button";
      retry.dataset.turn = String(turnIndex);
      bubble2.appendChild(retry);
      return bubble2;
    }
    const classes = turn.insufficient_context ? "answer answer-refusal warning" : "answer answer-grounded";
    const bubble = element("div", classes);
    if (turn.insufficient_context) {
      const icon = element("span", "warning-icon", "!");
      icon.setAttribute("aria-hidden", "true");
      bubble.appendChild(icon);
    }
    bubble.appendChild(element("span", "answer-text", turn.answer ?? ""));
    return bubble;
  }
  function metaRow(label, value, valueClass) {
    const row = element("div", "citation-meta-row");
    row.appendChild(element("dt", "citation-meta-label", label));
    row.appendChild(element("dd", valueClass, value));
    return row;
  }
  function renderCitations(turn, turnIndex) {
    const wrap = element("div", "citations");
    const list = element("ol", "citation-list");
    turn.citations.forEach((citation, citationIndex) => {
      const item = element("li", "citation");
      const bodyId = `turn-${turnIndex}-citation-${citationIndex}`;
      const toggle = element(
        "button",
        "citation-toggle",
        `[${citationIndex + 1}] ${citation.file_name} (p.${citation.page_number})`
      );
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
  function renderTurns() {
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
  function render() {
    renderDocuments();
    renderTurns();
    sendButton.disabled = state.pending;
  }
  function update(next) {
    state = next;
    render();
  }
  async function refreshDocuments() {
    update(setDocuments(state, await api.listDocuments()));
  }
  async function runUpload(file) {
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
  async function ensureConversation() {
    if (state.conversation_id) {
      return state.conversation_id;
    }
    const conversationId = await api.createConversation();
    update(setConversation(state, conversationId));
    return conversationId;
  }
  async function dispatchQuery(question) {
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
    const target = event.target;
    const toggle = target.closest("button.citation-toggle");
    if (toggle) {
      update(toggleCitation(state, Number(toggle.dataset.turn), Number(toggle.dataset.citation)));
      return;
    }
    const retry = target.closest("button.retry-button");
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
    }
  };
}

// src/main.ts
var root = document.getElementById("app");
if (root) {
  createApp(root, new ApiClient());
}
