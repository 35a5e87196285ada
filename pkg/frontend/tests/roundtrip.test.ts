// UI round trip against the real session service: the browser client must
// render exactly the system text the REPL produces (the bundled replay
// script is the shared source of truth), and the chips panel must match
// GET /state after every turn.

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { ChatController, parseQueryChips } from "../src/view.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = join(HERE, "..", "..");
const SCRIPT = join(REPO_ROOT, "src", "querydialog", "data", "figure3.script");
const PORT = 8700 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;

interface Step {
  user: string;
  system: string;
}

function loadScript(): { greeting: string; steps: Step[] } {
  const lines = readFileSync(SCRIPT, "utf-8")
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l && !l.startsWith("#"));
  const greeting = lines[0].slice(2).trim();
  const steps: Step[] = [];
  for (let i = 1; i + 1 < lines.length; i += 2) {
    steps.push({ user: lines[i].slice(2).trim(), system: lines[i + 1].slice(2).trim() });
  }
  return { greeting, steps };
}

let service: ChildProcess;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/sessions/none/state`);
      if (response.status === 404) return; // service is answering
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  service = spawn("python3", ["-m", "querydialog.cli", "serve", "--port", String(PORT)], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await waitForService();
}, 40_000);

afterAll(() => {
  service?.kill();
});

describe("UI round trip", () => {
  it("renders the scripted turns verbatim and keeps chips in sync", async () => {
    const { greeting, steps } = loadScript();
    const client = new ApiClient(BASE);
    const controller = new ChatController(client);
    await controller.start();

    expect(controller.view.messages[0]).toEqual({ speaker: "system", text: greeting });

    for (const step of steps.slice(0, 5)) {
      await controller.send(step.user);
      const lastBubble = controller.view.messages.at(-1);
      expect(lastBubble).toEqual({ speaker: "system", text: step.system });

      // panel consistency: chips equal the snapshot's canonical query
      const state = await client.getState(controller.sessionId!);
      expect(controller.view.chips).toEqual(parseQueryChips(state.query));
    }

    // by the fifth turn the figure's first query state is on the panel
    expect(controller.view.chips).toEqual([
      { kind: "motcle", label: "paludisme" },
      { kind: "qualificatif", label: "thérapeutique" },
    ]);

    // one more turn launches the query and surfaces the figure's count
    await controller.send(steps[5].user);
    expect(controller.view.messages.at(-1)?.text).toBe(steps[5].system);
    expect(controller.view.resultCount).toBe(11);
  }, 30_000);

  it("removing a chip round-trips as a user utterance", async () => {
    const client = new ApiClient(BASE);
    const controller = new ChatController(client);
    await controller.start();
    await controller.send("je voudrais des informations sur le paludisme");
    await controller.send("non");
    expect(controller.view.chips).toEqual([{ kind: "motcle", label: "paludisme" }]);

    await controller.removeChip(controller.view.chips[0]);
    expect(controller.view.chips).toEqual([]);
    const userBubbles = controller.view.messages.filter((m) => m.speaker === "user");
    expect(userBubbles.at(-1)?.text).toBe("enlever paludisme");
    const state = await client.getState(controller.sessionId!);
    expect(parseQueryChips(state.query)).toEqual([]);
  }, 30_000);
});
