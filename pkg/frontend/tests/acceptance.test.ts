/**
 * Scripted end-to-end run against a real service process with stub backends:
 * refusal styling on an empty corpus, document upload, two ordered turns
 * where the second refers back to the first, and byte-for-byte citation
 * display. The whole file must finish well inside two minutes.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";

import { afterAll, beforeAll, expect, it } from "vitest";

import { ApiClient, QueryResult } from "../src/api.js";
import { App, createApp } from "../src/view.js";

const FIXTURE_TEXT = [
  "Solar rebate policy overview.",
  "",
  "Households get 30 percent back on installation costs for rooftop solar",
  "panels. The rebate is paid once per property and is claimed through the",
  "regional energy office within ninety days of commissioning.",
  "",
  "Battery storage attached to a new solar installation qualifies for an",
  "additional flat payment of 800 euros. Stand-alone batteries do not",
  "qualify for any payment under this program.",
].join("\n");

class RecordingClient extends ApiClient {
  readonly results: QueryResult[] = [];

  override async query(
    conversationId: string,
    question: string,
    documentId?: string,
  ): Promise<QueryResult> {
    const result = await super.query(conversationId, question, documentId);
    this.results.push(result);
    return result;
  }
}

let child: ChildProcess | null = null;
let dataDir = "";
let base = "";
let serverLog = "";
let client: RecordingClient;
let app: App;
let root: HTMLElement;

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child && child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}\n${serverLog}`);
    }
    try {
      const response = await fetch(`${url}/api/health`);
      if (response.ok) {
        return;
      }
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service never became healthy at ${url}: ${lastError}\n${serverLog}`);
}

beforeAll(async () => {
  dataDir = mkdtempSync(path.join(tmpdir(), "docqa-ui-"));
  const port = 20000 + Math.floor(Math.random() * 20000);
  base = `http://127.0.0.1:${port}`;
  child = spawn("engine", ["serve", "--data-dir", dataDir, "--port", String(port)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  child.stdout?.on("data", (buf: Buffer) => (serverLog += buf.toString()));
  child.stderr?.on("data", (buf: Buffer) => (serverLog += buf.toString()));
  await waitForHealth(base, 60_000);

  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  client = new RecordingClient(base);
  app = createApp(root, client);
  await app.whenIdle();
}, 90_000);

afterAll(async () => {
  if (child) {
    child.kill("SIGTERM");
    await new Promise((resolve) => setTimeout(resolve, 300));
    if (child.exitCode === null) {
      child.kill("SIGKILL");
    }
  }
  if (dataDir) {
    rmSync(dataDir, { recursive: true, force: true });
  }
});

function submit(selector: string): void {
  root
    .querySelector<HTMLFormElement>(selector)!
    .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

async function ask(question: string): Promise<void> {
  const input = root.querySelector<HTMLInputElement>("#question-input")!;
  input.value = question;
  submit("#question-form");
  await app.whenIdle();
}

function lastTurn(): HTMLElement {
  const turns = root.querySelectorAll<HTMLElement>(".turn");
  expect(turns.length).toBeGreaterThan(0);
  return turns[turns.length - 1];
}

it("renders a refusal with the sentinel and warning styling while the corpus is empty", async () => {
  await ask("What does the maintenance manual say about reactor coolant?");
  const bubble = lastTurn().querySelector<HTMLElement>(".answer-refusal");
  expect(bubble).not.toBeNull();
  expect(bubble!.className).toContain("warning");
  const rendered = bubble!.querySelector(".answer-text")!.textContent;
  expect(rendered).toBe("not enough context");
  expect(rendered).toBe(client.results[0].answer);
  expect(client.results[0].insufficient_context).toBe(true);
}, 30_000);

it("uploads the fixture document and lists it with page and chunk counts", async () => {
  const file = new File([FIXTURE_TEXT], "solar_policy.txt", { type: "text/plain" });
  const input = root.querySelector<HTMLInputElement>("#file-input")!;
  Object.defineProperty(input, "files", { value: [file], configurable: true });
  submit("#upload-form");
  await app.whenIdle();

  const rows = root.querySelectorAll(".document");
  expect(rows).toHaveLength(1);
  expect(rows[0].textContent).toContain("solar_policy.txt");
  const toast = root.querySelector("#toast") as HTMLElement;
  expect(toast.hidden).toBe(false);
  expect(toast.textContent).toMatch(/1 page/);
  expect(toast.textContent).toMatch(/\d+ chunks?/);
}, 30_000);

it("answers two questions, the second referring to the first, and keeps turn order", async () => {
  await ask("How large is the rebate for rooftop solar panels?");
  await ask("Does that rebate also cover battery storage?");

  const questions = [...root.querySelectorAll(".turn-question")].map((n) => n.textContent);
  expect(questions).toEqual([
    "What does the maintenance manual say about reactor coolant?",
    "How large is the rebate for rooftop solar panels?",
    "Does that rebate also cover battery storage?",
  ]);

  const grounded = root.querySelectorAll(".answer-grounded");
  expect(grounded).toHaveLength(2);
  expect(client.results[1].insufficient_context).toBe(false);
  expect(client.results[2].insufficient_context).toBe(false);
  expect(client.results[2].citations.length).toBeGreaterThan(0);

  // The server agrees on the ordering of the recorded conversation.
  const history = await client.getHistory(app.state.conversation_id as string);
  expect(history.map((t) => t.question)).toEqual(questions);
  expect(history.map((t) => t.turn_index)).toEqual([0, 1, 2]);
}, 60_000);

it("shows expanded citation text byte-for-byte equal to the API payload", async () => {
  const payload = client.results[2];
  const turn = lastTurn();
  const toggles = turn.querySelectorAll<HTMLButtonElement>(".citation-toggle");
  expect(toggles.length).toBe(payload.citations.length);

  toggles[0].click();
  const body = lastTurn().querySelectorAll<HTMLElement>(".citation-body")[0];
  expect(body.hidden).toBe(false);
  expect(body.querySelector(".citation-text")!.textContent).toBe(payload.citations[0].text);
  expect(body.querySelector(".citation-file")!.textContent).toBe(payload.citations[0].file_name);
  expect(body.querySelector(".citation-page")!.textContent).toBe(
    String(payload.citations[0].page_number),
  );
  expect(body.querySelector(".citation-score")!.textContent).toBe(
    String(payload.citations[0].score),
  );

  // Other citations stay collapsed, and a second activation collapses this one.
  for (const other of [...lastTurn().querySelectorAll<HTMLElement>(".citation-body")].slice(1)) {
    expect(other.hidden).toBe(true);
  }
  const again = lastTurn().querySelectorAll<HTMLButtonElement>(".citation-toggle")[0];
  again.click();
  expect(lastTurn().querySelectorAll<HTMLElement>(".citation-body")[0].hidden).toBe(true);
}, 30_000);
