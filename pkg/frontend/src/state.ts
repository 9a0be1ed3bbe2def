/**
 * Chat view state and its pure transition functions.
 *
 * The reducers never mutate their inputs and never touch the DOM, so every
 * invariant the interface relies on (turns stay in chronological order,
 * citation text passes through untouched, expanding one citation leaves the
 * others alone) is testable without a browser.
 */

import type { Citation, DocumentInfo, QueryResult } from "./api.js";

export type TurnStatus = "pending" | "answered" | "failed";

export interface TurnView {
  question: string;
  answer: string | null;
  insufficient_context: boolean;
  citations: Citation[];
  /** One expand/collapse flag per citation, all collapsed initially. */
  expanded: boolean[];
  status: TurnStatus;
  error: string | null;
}

export interface ChatViewState {
  conversation_id: string | null;
  turns: TurnView[];
  pending: boolean;
  documents: DocumentInfo[];
}

export function initialState(): ChatViewState {
  return { conversation_id: null, turns: [], pending: false, documents: [] };
}

export function setConversation(state: ChatViewState, conversationId: string): ChatViewState {
  return { ...state, conversation_id: conversationId };
}

export function setDocuments(state: ChatViewState, documents: DocumentInfo[]): ChatViewState {
  return { ...state, documents: [...documents] };
}

/**
 * Append a pending turn for a just-sent question. Only one query may be in
 * flight, so beginning a question while another is pending is a caller bug.
 */
export function beginQuestion(state: ChatViewState, question: string): ChatViewState {
  if (state.pending) {
    throw new Error("a query is already in flight");
  }
  const turn: TurnView = {
    question,
    answer: null,
    insufficient_context: false,
    citations: [],
    expanded: [],
    status: "pending",
    error: null,
  };
  return { ...state, turns: [...state.turns, turn], pending: true };
}

function pendingIndex(state: ChatViewState): number {
  for (let i = state.turns.length - 1; i >= 0; i--) {
    if (state.turns[i].status === "pending") {
      return i;
    }
  }
  throw new Error("no pending turn to settle");
}

/** Fill the pending turn with a server answer, citations collapsed. */
export function resolveAnswer(state: ChatViewState, result: QueryResult): ChatViewState {
  const index = pendingIndex(state);
  const turns = state.turns.slice();
  turns[index] = {
    ...turns[index],
    answer: result.answer,
    insufficient_context: result.insufficient_context,
    citations: result.citations,
    expanded: result.citations.map(() => false),
    status: "answered",
    error: null,
  };
  return { ...state, turns, pending: false };
}

/** Mark the pending turn failed; the turn stays visible with its question. */
export function failAnswer(state: ChatViewState, message: string): ChatViewState {
  const index = pendingIndex(state);
  const turns = state.turns.slice();
  turns[index] = { ...turns[index], status: "failed", error: message };
  return { ...state, turns, pending: false };
}

/** Put a failed turn back in flight so its question can be retried. */
export function retryTurn(state: ChatViewState, turnIndex: number): ChatViewState {
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

/** Flip one citation's expanded flag without touching any other. */
export function toggleCitation(
  state: ChatViewState,
  turnIndex: number,
  citationIndex: number,
): ChatViewState {
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
