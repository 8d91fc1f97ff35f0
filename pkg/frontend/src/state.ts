/** Pure view-state transitions.  The message list is append-only and debug
 * blocks stay 1:1 with bot turns by construction. */

import type { ChatViewState, SessionInfo, TurnResponse } from "./types.js";

export function initialState(task: string, backend: string): ChatViewState {
  return {
    sessionId: null,
    task,
    backend,
    messages: [],
    debugBlocks: [],
    connection: "idle",
    error: null,
    retryText: null,
    inputDisabled: true,
  };
}

export function connecting(state: ChatViewState): ChatViewState {
  return { ...state, connection: "connecting", error: null };
}

export function sessionStarted(state: ChatViewState, info: SessionInfo, now = Date.now()): ChatViewState {
  const next: ChatViewState = {
    ...state,
    sessionId: info.session_id,
    connection: "ready",
    error: null,
    inputDisabled: false,
  };
  if (info.opening) {
    next.messages = [...state.messages, { speaker: "bot", text: info.opening.reply, timestamp: now }];
    next.debugBlocks = [...state.debugBlocks, { themes: info.opening.themes, action: info.opening.action }];
  }
  return next;
}

export function startFailed(state: ChatViewState, message: string): ChatViewState {
  return { ...state, connection: "error", error: message, inputDisabled: true };
}

export function canSend(state: ChatViewState, text: string): boolean {
  return (
    state.sessionId !== null &&
    !state.inputDisabled &&
    state.connection === "ready" &&
    text.trim().length > 0
  );
}

/** Optimistic user bubble; input pauses until the turn resolves. */
export function sendPending(state: ChatViewState, text: string, now = Date.now()): ChatViewState {
  return {
    ...state,
    messages: [...state.messages, { speaker: "user", text, timestamp: now, pending: true }],
    connection: "waiting",
    error: null,
    retryText: null,
    inputDisabled: true,
  };
}

export function turnReceived(state: ChatViewState, turn: TurnResponse, now = Date.now()): ChatViewState {
  const messages = state.messages.map((m) => (m.pending ? { ...m, pending: false } : m));
  messages.push({ speaker: "bot", text: turn.reply, timestamp: now });
  return {
    ...state,
    messages,
    debugBlocks: [...state.debugBlocks, { themes: turn.themes, action: turn.action }],
    connection: turn.closed ? "closed" : "ready",
    inputDisabled: turn.closed,
    error: null,
  };
}

/** Failure after an optimistic send: keep the bubble, offer a retry. */
export function turnFailed(state: ChatViewState, text: string, message: string, retryable: boolean): ChatViewState {
  return {
    ...state,
    connection: "error",
    error: message,
    retryText: retryable ? text : null,
    inputDisabled: false,
  };
}

/** The service reported the session closed (e.g. posting after farewell). */
export function sessionEnded(state: ChatViewState): ChatViewState {
  return { ...state, connection: "closed", inputDisabled: true, retryText: null };
}

export function botTurnCount(state: ChatViewState): number {
  return state.messages.filter((m) => m.speaker === "bot").length;
}

export function userTurnCount(state: ChatViewState): number {
  return state.messages.filter((m) => m.speaker === "user").length;
}

/** Invariant check used by tests: blocks track bot turns exactly. */
export function debugBlocksConsistent(state: ChatViewState): boolean {
  return state.debugBlocks.length === botTurnCount(state);
}
