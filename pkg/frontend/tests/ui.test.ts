import { describe, expect, it } from "vitest";

import { connecting, initialState, sendPending, sessionStarted, turnReceived } from "../src/state.js";
import type { SessionInfo, TurnResponse } from "../src/types.js";
import { escapeHtml, renderApp, renderDebugPanel, renderMessages } from "../src/ui.js";

const info: SessionInfo = {
  session_id: "s",
  task: "concierge",
  backend: "mock",
  seed: 1,
  opening: null,
  state_digest: "d",
};

const turn: TurnResponse = {
  reply: "How about Southern Recipes Grill?",
  themes: "require('customer rating',['low','average','high'])",
  action: "recommend('Southern Recipes Grill')",
  state_digest: "d",
  closed: false,
};

describe("rendering", () => {
  it("escapes markup in user text", () => {
    expect(escapeHtml("<script>alert('x')</script>")).not.toContain("<script>");
  });

  it("renders bubbles per speaker in order", () => {
    let state = sessionStarted(connecting(initialState("concierge", "mock")), info);
    state = turnReceived(sendPending(state, "No, I'm not looking for a specific rating score."), turn);
    const html = renderMessages(state);
    const userIndex = html.indexOf('class="bubble user"');
    const botIndex = html.indexOf('class="bubble bot"');
    expect(userIndex).toBeGreaterThanOrEqual(0);
    expect(botIndex).toBeGreaterThan(userIndex);
  });

  it("renders the raw predicate blocks in monospace panes", () => {
    let state = sessionStarted(connecting(initialState("concierge", "mock")), info);
    state = turnReceived(sendPending(state, "hi"), turn);
    const panel = renderDebugPanel(state);
    expect(panel).toContain("require(&#39;customer rating&#39;");
    expect(panel).toContain("recommend(&#39;Southern Recipes Grill&#39;)");
    expect(panel).toContain("<details");
  });

  it("disables the composer once the conversation is over", () => {
    let state = sessionStarted(connecting(initialState("concierge", "mock")), info);
    state = turnReceived(sendPending(state, "bye"), { ...turn, closed: true, action: "farewell" });
    const html = renderApp(state);
    expect(html).toContain('<input id="composer-input" type="text" placeholder="say something" disabled />');
    expect(html).toContain("Conversation ended.");
  });
});
