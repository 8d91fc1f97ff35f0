/**
 * End-to-end: a scripted concierge conversation against the real service
 * (mock language backend), driven through the same client + reducers +
 * renderer the browser uses.  Debug-block predicate text is verified by the
 * engine's own parser via a python subprocess, so no parsing logic is
 * duplicated client-side.
 *
 * Requires the python package to be installed (pip install -e .).
 */
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import {
  botTurnCount,
  canSend,
  connecting,
  debugBlocksConsistent,
  initialState,
  sendPending,
  sessionStarted,
  turnReceived,
  userTurnCount,
} from "../src/state.js";
import type { ChatViewState } from "../src/types.js";
import { renderApp } from "../src/ui.js";

const SCRIPT = [
  "Hello!",
  "Can you recommend me a restaurant?",
  "I can try any food except curry.",
  "Less than fifteen dollars.",
  "No, I'm not looking for a specific rating score.",
  "Sounds nice. Can you give me its address?",
  "Thank you for your help.",
];

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

function parsesAsPredicates(text: string): boolean {
  try {
    execFileSync(
      "python3",
      ["-c", "import sys; from symdial.terms import parse_predicates; parse_predicates(sys.stdin.read())"],
      { input: text, stdio: ["pipe", "ignore", "pipe"] },
    );
    return true;
  } catch {
    return false;
  }
}

describe("web chat against the live service", () => {
  let proc: ChildProcess;
  let client: ServiceClient;

  beforeAll(async () => {
    const port = await freePort();
    const dataDir = mkdtempSync(join(tmpdir(), "symdial-e2e-"));
    proc = spawn(
      "python3",
      ["-m", "symdial.cli", "serve", "--port", String(port), "--data-dir", dataDir],
      { stdio: "ignore" },
    );
    client = new ServiceClient(`http://127.0.0.1:${port}`);
    const deadline = Date.now() + 30_000;
    for (;;) {
      try {
        await client.health();
        break;
      } catch {
        if (Date.now() > deadline) throw new Error("service did not start");
        await new Promise((r) => setTimeout(r, 150));
      }
    }
  });

  afterAll(() => {
    proc?.kill("SIGKILL");
  });

  it("renders the scripted conversation with one debug block per bot turn", async () => {
    let state: ChatViewState = connecting(initialState("concierge", "mock"));
    const info = await client.createSession("concierge", "mock", 0);
    state = sessionStarted(state, info);
    expect(info.opening).toBeNull();

    for (const text of SCRIPT) {
      expect(canSend(state, text)).toBe(true);
      state = sendPending(state, text);
      const turn = await client.postMessage(info.session_id, text);
      state = turnReceived(state, turn);
    }

    expect(userTurnCount(state)).toBe(7);
    expect(botTurnCount(state)).toBe(7);
    expect(state.debugBlocks).toHaveLength(7);
    expect(debugBlocksConsistent(state)).toBe(true);

    for (const block of state.debugBlocks) {
      expect(parsesAsPredicates(block.themes)).toBe(true);
      expect(parsesAsPredicates(block.action)).toBe(true);
    }

    // the reasoner's trace is visible in the panel data
    expect(state.debugBlocks[1]?.themes).toContain("require('name',['query'])");
    expect(state.debugBlocks[6]?.action).toBe("farewell");

    // input locks after the farewell turn
    expect(state.connection).toBe("closed");
    expect(state.inputDisabled).toBe(true);
    expect(canSend(state, "one more thing")).toBe(false);

    const html = renderApp(state);
    expect((html.match(/class="bubble user"/g) ?? []).length).toBe(7);
    expect((html.match(/class="bubble bot"/g) ?? []).length).toBe(7);
    expect((html.match(/<details class="debug-block"/g) ?? []).length).toBe(7);
    expect(html).toContain("disabled");
  });

  it("surfaces a session-ended rejection as a closed state", async () => {
    const info = await client.createSession("concierge", "mock", 1);
    await client.postMessage(info.session_id, "Thank you for your help.");
    await expect(client.postMessage(info.session_id, "hello again")).rejects.toMatchObject({
      status: 409,
    });
  });
});
