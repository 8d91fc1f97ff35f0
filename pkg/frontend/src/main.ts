/** Browser entry point: wires the task/backend selector, the service
 * client, the reducers, and re-rendering. */

import { ServiceClient, ServiceError, SessionClosedError } from "./api.js";
import {
  canSend,
  connecting,
  initialState,
  sendPending,
  sessionEnded,
  sessionStarted,
  startFailed,
  turnFailed,
  turnReceived,
} from "./state.js";
import type { ChatViewState } from "./types.js";
import { renderApp } from "./ui.js";

const baseUrl = (window as unknown as { SYMDIAL_BASE_URL?: string }).SYMDIAL_BASE_URL ?? "";
const client = new ServiceClient(baseUrl);

let state: ChatViewState = initialState("concierge", "mock");

function mount(): HTMLElement {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  return root;
}

function render(): void {
  const root = mount();
  root.innerHTML = renderApp(state);
  const input = root.querySelector<HTMLInputElement>("#composer-input");
  const send = root.querySelector<HTMLButtonElement>("#composer-send");
  const retry = root.querySelector<HTMLButtonElement>("button.retry");
  if (input && send) {
    const submit = () => void sendMessage(input.value);
    send.addEventListener("click", submit);
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") submit();
    });
    input.focus();
  }
  if (retry) {
    retry.addEventListener("click", () => void sendMessage(retry.dataset.retry ?? ""));
  }
  const messages = root.querySelector(".messages");
  if (messages) messages.scrollTop = messages.scrollHeight;
}

function setState(next: ChatViewState): void {
  state = next;
  render();
}

async function startSession(task: string, backend: string): Promise<void> {
  setState(connecting(initialState(task, backend)));
  try {
    const info = await client.createSession(task, backend);
    setState(sessionStarted(state, info));
  } catch (err) {
    setState(startFailed(state, err instanceof Error ? err.message : String(err)));
  }
}

async function sendMessage(text: string): Promise<void> {
  if (!canSend(state, text)) return;
  const sessionId = state.sessionId as string;
  setState(sendPending(state, text));
  try {
    const turn = await client.postMessage(sessionId, text);
    setState(turnReceived(state, turn));
  } catch (err) {
    if (err instanceof SessionClosedError) {
      setState(sessionEnded(state));
    } else if (err instanceof ServiceError) {
      setState(turnFailed(state, text, err.message, err.retryable));
    } else {
      setState(turnFailed(state, text, String(err), false));
    }
  }
}

function wireSelector(): void {
  const form = document.getElementById("session-form") as HTMLFormElement | null;
  if (!form) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void startSession(String(data.get("task") ?? "concierge"), String(data.get("backend") ?? "mock"));
  });
}

wireSelector();
render();
void startSession("concierge", "mock");
