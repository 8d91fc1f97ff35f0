import { describe, expect, it } from "vitest";

import {
  botTurnCount,
  canSend,
  connecting,
  debugBlocksConsistent,
  initialState,
  sendPending,
  sessionEnded,
  sessionStarted,
  startFailed,
  turnFailed,
  turnReceived,
  userTurnCount,
} from "../src/state.js";
import type { SessionInfo, TurnResponse } from "../src/types.js";

const info = (opening: TurnResponse | null): SessionInfo => ({
  session_id: "abc123",
  task: "concierge",
  backend: "mock",
  seed: 1,
  opening,
  state_digest: "d",
});

const turn = (overrides: Partial<TurnResponse> = {}): TurnResponse => ({
  reply: "What kind of food are you in the mood for?",
  themes: "require('name',['query'])",
  action: "ask('food type')",
  state_digest: "d2",
  closed: false,
  ...overrides,
});

describe("session start", () => {
  it("enables input once the session exists", () => {
    let state = initialState("concierge", "mock");
    expect(state.inputDisabled).toBe(true);
    state = sessionStarted(connecting(state), info(null));
    expect(state.inputDisabled).toBe(false);
    expect(state.connection).toBe("ready");
    expect(state.messages).toHaveLength(0);
  });

  it("renders a greeting bubble and debug block when the service opens", () => {
    const opening = turn({ reply: "Have you watched anything lately?", themes: "" });
    const state = sessionStarted(connecting(initialState("companion", "mock")), info(opening));
    expect(state.messages).toEqual([
      expect.objectContaining({ speaker: "bot", text: opening.reply }),
    ]);
    expect(state.debugBlocks).toEqual([{ themes: "", action: opening.action }]);
    expect(debugBlocksConsistent(state)).toBe(true);
  });

  it("shows a visible error state when the service is down", () => {
    const state = startFailed(connecting(initialState("concierge", "mock")), "service unreachable");
    expect(state.connection).toBe("error");
    expect(state.error).toContain("unreachable");
    expect(state.inputDisabled).toBe(true);
  });
});

describe("sending", () => {
  const ready = () => sessionStarted(connecting(initialState("concierge", "mock")), info(null));

  it("disallows empty and whitespace-only sends", () => {
    const state = ready();
    expect(canSend(state, "")).toBe(false);
    expect(canSend(state, "   ")).toBe(false);
    expect(canSend(state, "hi")).toBe(true);
  });

  it("adds an optimistic bubble then confirms it with the bot reply", () => {
    let state = sendPending(ready(), "Hello!");
    expect(state.messages.at(-1)).toMatchObject({ speaker: "user", pending: true });
    expect(state.inputDisabled).toBe(true);
    state = turnReceived(state, turn());
    expect(state.messages.map((m) => m.speaker)).toEqual(["user", "bot"]);
    expect(state.messages[0]?.pending).toBe(false);
    expect(state.inputDisabled).toBe(false);
    expect(debugBlocksConsistent(state)).toBe(true);
  });

  it("never reorders turns across a conversation", () => {
    let state = ready();
    for (let i = 0; i < 4; i += 1) {
      state = turnReceived(sendPending(state, `m${i}`), turn());
    }
    expect(state.messages.map((m) => m.speaker)).toEqual([
      "user", "bot", "user", "bot", "user", "bot", "user", "bot",
    ]);
    expect(userTurnCount(state)).toBe(4);
    expect(botTurnCount(state)).toBe(4);
    expect(state.debugBlocks).toHaveLength(4);
  });

  it("locks input after a closing turn", () => {
    const state = turnReceived(sendPending(ready(), "Thank you for your help."), turn({ closed: true, action: "farewell" }));
    expect(state.connection).toBe("closed");
    expect(state.inputDisabled).toBe(true);
    expect(canSend(state, "one more")).toBe(false);
  });

  it("offers a retry after a retryable failure and keeps the bubble", () => {
    const state = turnFailed(sendPending(ready(), "hello"), "hello", "HTTP 503", true);
    expect(state.retryText).toBe("hello");
    expect(state.error).toContain("503");
    expect(state.messages).toHaveLength(1);
    expect(state.inputDisabled).toBe(false);
  });

  it("shows the session-ended banner on a closed-session rejection", () => {
    const state = sessionEnded(sendPending(ready(), "late message"));
    expect(state.connection).toBe("closed");
    expect(state.inputDisabled).toBe(true);
  });
});
