/** HTML rendering as pure string functions, so the exact markup the browser
 * shows is testable without a DOM. */

import type { ChatViewState } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderMessages(state: ChatViewState): string {
  return state.messages
    .map((m) => {
      const pending = m.pending ? " pending" : "";
      return `<div class="bubble ${m.speaker}${pending}"><span class="text">${escapeHtml(m.text)}</span></div>`;
    })
    .join("\n");
}

export function renderDebugPanel(state: ChatViewState): string {
  return state.debugBlocks
    .map((block, index) => {
      const themes = block.themes ? escapeHtml(block.themes) : "(no predicates)";
      return [
        `<details class="debug-block" data-turn="${index + 1}">`,
        `<summary>turn ${index + 1}</summary>`,
        `<pre class="themes">${themes}</pre>`,
        `<pre class="action">${escapeHtml(block.action)}</pre>`,
        `</details>`,
      ].join("");
    })
    .join("\n");
}

export function renderStatus(state: ChatViewState): string {
  switch (state.connection) {
    case "closed":
      return `<div class="banner closed">Conversation ended.</div>`;
    case "error": {
      const retry = state.retryText
        ? `<button class="retry" data-retry="${escapeHtml(state.retryText)}">retry</button>`
        : "";
      return `<div class="banner error">${escapeHtml(state.error ?? "something went wrong")}${retry}</div>`;
    }
    case "waiting":
      return `<div class="banner waiting">…</div>`;
    case "connecting":
      return `<div class="banner waiting">connecting…</div>`;
    default:
      return "";
  }
}

export function renderComposer(state: ChatViewState): string {
  const disabled = state.inputDisabled ? " disabled" : "";
  return [
    `<input id="composer-input" type="text" placeholder="say something"${disabled} />`,
    `<button id="composer-send"${disabled}>send</button>`,
  ].join("");
}

export function renderApp(state: ChatViewState): string {
  return [
    `<div class="chat-pane">`,
    `<div class="messages">${renderMessages(state)}</div>`,
    renderStatus(state),
    `<div class="composer">${renderComposer(state)}</div>`,
    `</div>`,
    `<aside class="debug-pane"><h2>predicates</h2>${renderDebugPanel(state)}</aside>`,
  ].join("\n");
}
