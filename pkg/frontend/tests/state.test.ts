import { describe, expect, it } from "vitest";

import type { Citation, DocumentInfo, QueryResult } from "../src/api.js";
import {
  ChatViewState,
  beginQuestion,
  failAnswer,
  initialState,
  resolveAnswer,
  retryTurn,
  setConversation,
  setDocuments,
  toggleCitation,
} from "../src/state.js";

function citation(i: number): Citation {
  return {
    chunk_id: `chunk-${i}`,
    file_name: `doc-${i}.txt`,
    page_number: i,
    text: `  raw text ${i} with   spacing\nand a newline `,
    score: i + 0.5,
  };
}

function answered(citations: Citation[]): QueryResult {
  return { answer: "An answer.", insufficient_context: false, citations };
}

function docInfo(i: number): DocumentInfo {
  return {
    document_id: `d-${i}`,
    file_name: `doc-${i}.txt`,
    page_count: i,
    summary: "s",
    ingested_at: "2026-01-01T00:00:00Z",
    summary_is_fallback: false,
  };
}

describe("initialState", () => {
  it("starts empty with no conversation and nothing pending", () => {
    const state = initialState();
    expect(state.conversation_id).toBeNull();
    expect(state.turns).toEqual([]);
    expect(state.pending).toBe(false);
    expect(state.documents).toEqual([]);
  });
});

describe("beginQuestion", () => {
  it("appends a pending turn and flags the query in flight", () => {
    const state = beginQuestion(initialState(), "What is the rebate?");
    expect(state.pending).toBe(true);
    expect(state.turns).toHaveLength(1);
    expect(state.turns[0].question).toBe("What is the rebate?");
    expect(state.turns[0].status).toBe("pending");
    expect(state.turns[0].answer).toBeNull();
  });

  it("keeps turns in chronological order across several questions", () => {
    let state = initialState();
    for (const q of ["first", "second", "third"]) {
      state = resolveAnswer(beginQuestion(state, q), answered([]));
    }
    expect(state.turns.map((t) => t.question)).toEqual(["first", "second", "third"]);
  });

  it("rejects a second in-flight question", () => {
    const state = beginQuestion(initialState(), "one");
    expect(() => beginQuestion(state, "two")).toThrow(/already in flight/);
  });

  it("does not mutate the previous state", () => {
    const before = initialState();
    beginQuestion(before, "q");
    expect(before.turns).toHaveLength(0);
    expect(before.pending).toBe(false);
  });
});

describe("resolveAnswer", () => {
  it("fills the pending turn and collapses every citation", () => {
    const result = answered([citation(1), citation(2)]);
    const state = resolveAnswer(beginQuestion(initialState(), "q"), result);
    expect(state.pending).toBe(false);
    const turn = state.turns[0];
    expect(turn.status).toBe("answered");
    expect(turn.answer).toBe("An answer.");
    expect(turn.citations).toHaveLength(2);
    expect(turn.expanded).toEqual([false, false]);
  });

  it("passes citation text through verbatim", () => {
    const raw = citation(1);
    const state = resolveAnswer(beginQuestion(initialState(), "q"), answered([raw]));
    expect(state.turns[0].citations[0].text).toBe(raw.text);
  });

  it("records a refusal flag from the server", () => {
    const refusal: QueryResult = {
      answer: "Not enough context.",
      insufficient_context: true,
      citations: [],
    };
    const state = resolveAnswer(beginQuestion(initialState(), "q"), refusal);
    expect(state.turns[0].insufficient_context).toBe(true);
    expect(state.turns[0].answer).toBe("Not enough context.");
  });

  it("throws when nothing is pending", () => {
    expect(() => resolveAnswer(initialState(), answered([]))).toThrow(/no pending turn/);
  });
});

describe("failAnswer and retryTurn", () => {
  function failed(): ChatViewState {
    return failAnswer(beginQuestion(initialState(), "q"), "boom");
  }

  it("marks the pending turn failed but keeps it visible", () => {
    const state = failed();
    expect(state.pending).toBe(false);
    expect(state.turns).toHaveLength(1);
    expect(state.turns[0].status).toBe("failed");
    expect(state.turns[0].error).toBe("boom");
    expect(state.turns[0].answer).toBeNull();
  });

  it("retry puts the failed turn back in flight in place", () => {
    const state = retryTurn(failed(), 0);
    expect(state.pending).toBe(true);
    expect(state.turns[0].status).toBe("pending");
    expect(state.turns[0].error).toBeNull();
    const settled = resolveAnswer(state, answered([]));
    expect(settled.turns[0].status).toBe("answered");
  });

  it("retry refuses turns that did not fail", () => {
    const state = resolveAnswer(beginQuestion(initialState(), "q"), answered([]));
    expect(() => retryTurn(state, 0)).toThrow(/not in a failed state/);
  });

  it("retry refuses while another query is pending", () => {
    let state = failed();
    state = beginQuestion(state, "next");
    expect(() => retryTurn(state, 0)).toThrow(/already in flight/);
  });
});

describe("toggleCitation", () => {
  function withCitations(): ChatViewState {
    return resolveAnswer(
      beginQuestion(initialState(), "q"),
      answered([citation(1), citation(2), citation(3)]),
    );
  }

  it("expands exactly the requested citation", () => {
    const state = toggleCitation(withCitations(), 0, 1);
    expect(state.turns[0].expanded).toEqual([false, true, false]);
  });

  it("collapses on a second toggle", () => {
    const once = toggleCitation(withCitations(), 0, 1);
    const twice = toggleCitation(once, 0, 1);
    expect(twice.turns[0].expanded).toEqual([false, false, false]);
  });

  it("leaves other citations untouched across independent toggles", () => {
    let state = withCitations();
    state = toggleCitation(state, 0, 0);
    state = toggleCitation(state, 0, 2);
    expect(state.turns[0].expanded).toEqual([true, false, true]);
    state = toggleCitation(state, 0, 0);
    expect(state.turns[0].expanded).toEqual([false, false, true]);
  });

  it("never alters citation content", () => {
    const before = withCitations();
    const after = toggleCitation(before, 0, 1);
    expect(after.turns[0].citations).toEqual(before.turns[0].citations);
  });

  it("validates indices", () => {
    expect(() => toggleCitation(withCitations(), 5, 0)).toThrow(/no turn/);
    expect(() => toggleCitation(withCitations(), 0, 9)).toThrow(/no citation/);
  });
});

describe("documents and conversation", () => {
  it("setDocuments replaces the list with a copy", () => {
    const docs = [docInfo(1), docInfo(2)];
    const state = setDocuments(initialState(), docs);
    expect(state.documents).toEqual(docs);
    docs.pop();
    expect(state.documents).toHaveLength(2);
  });

  it("setConversation records the id", () => {
    const state = setConversation(initialState(), "conv-1");
    expect(state.conversation_id).toBe("conv-1");
  });
});
