/** Live-server acceptance: the scripted browser flow must reproduce the CLI
 * simulation exactly, and a forced reload must mirror server state. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ScreeningStore } from "../src/state.js";
import { renderQueue } from "../src/render.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const REPO = resolve(HERE, "..", "..");
const TOY = join(REPO, "src", "mirrormatch", "data", "toy");
const PYTHON = process.env.PYTHON ?? "python3";

const EMB_ARGS = ["--seed", "13", "--dim", "24", "--window", "4",
                  "--min-count", "5", "--epochs", "3"];
const SEED_DOC = "SR1-004"; // first relevant document of SR1
const BATCH = 20;
const ROUNDS = 2;

function freePort(): Promise<number> {
  return new Promise((done, fail) => {
    const srv = createServer();
    srv.once("error", fail);
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        fail(new Error("no port assigned"));
        return;
      }
      srv.close(() => done(address.port));
    });
  });
}

function readQrels(): Map<string, boolean> {
  const out = new Map<string, boolean>();
  for (const line of readFileSync(join(TOY, "qrels.txt"), "utf-8").split("\n")) {
    const parts = line.trim().split(/\s+/);
    if (parts.length === 4) out.set(parts[2]!, parts[3] === "1");
  }
  return out;
}

let server: ChildProcess | null = null;
let base = "";
let corpusId = "";
const qrels = readQrels();

async function waitForHealth(api: ApiClient): Promise<string> {
  for (let attempt = 0; attempt < 240; attempt++) {
    try {
      const health = await api.health();
      if (health.status === "ok" && health.corpora.length > 0) {
        return health.corpora[0]!;
      }
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  const dataDir = mkdtempSync(join(tmpdir(), "workbench-"));
  server = spawn(
    PYTHON,
    ["-m", "mirrormatch.cli", "serve",
     "--corpus", join(TOY, "corpus.jsonl"),
     "--topics", join(TOY, "topics.json"),
     "--qrels", join(TOY, "qrels.txt"),
     ...EMB_ARGS,
     "--data-dir", dataDir,
     "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  corpusId = await waitForHealth(new ApiClient(base));
}, 150_000);

afterAll(() => {
  server?.kill();
});

function cliSimulationRanking(): string[] {
  const work = mkdtempSync(join(tmpdir(), "simulate-"));
  const dumps = join(work, "dumps");
  const res = spawnSync(
    PYTHON,
    ["-m", "mirrormatch.cli", "simulate",
     "--corpus", join(TOY, "corpus.jsonl"),
     "--topics", join(TOY, "topics.json"),
     "--qrels", join(TOY, "qrels.txt"),
     "--model", "mmatch", "--embeddings", "train", ...EMB_ARGS,
     "--cache-dir", join(work, "cache"),
     "--batch", String(BATCH), "--rounds", String(ROUNDS),
     "--out", join(work, "sim.csv"), "--dump-rankings", dumps],
    { encoding: "utf-8" },
  );
  expect(res.status, res.stderr).toBe(0);
  const fragment = readFileSync(
    join(dumps, `SR1__${SEED_DOC}__round${ROUNDS}.txt`), "utf-8");
  return fragment
    .trim()
    .split("\n")
    .filter((l) => l.length > 0)
    .map((l) => l.split(/\s+/)[2]!);
}

describe("scripted browser flow against the live service", () => {
  it("label 20 / re-rank twice matches the CLI simulation ranking", async () => {
    const store = new ScreeningStore(new ApiClient(base));
    await store.createSession({
      corpus_id: corpusId,
      sr_id: "SR1",
      seed_doc_ids: [SEED_DOC],
      model: "mmatch",
      params: { lambda: 0.35 },
    });
    expect(store.state.round).toBe(0);

    for (let round = 0; round < ROUNDS; round++) {
      const batch = store.state.page!.entries.slice(0, BATCH);
      for (const entry of batch) {
        store.queueLabel(entry.doc_id, qrels.get(entry.doc_id) ? "relevant" : "irrelevant");
      }
      expect(store.batchReady()).toBe(true);
      await store.submitAndRerank();
    }

    expect(store.state.round).toBe(ROUNDS);
    expect(store.state.progress!.curve).toHaveLength(ROUNDS);

    const finalPage = await new ApiClient(base).ranking(
      store.state.sessionId!, 0, 100);
    const uiOrder = finalPage.entries.map((e) => e.doc_id);
    expect(uiOrder.length).toBeGreaterThan(0);
    expect(uiOrder).toEqual(cliSimulationRanking());
  }, 120_000);

  it("forced reload shows exactly the server ranking payload", async () => {
    const api = new ApiClient(base);
    const store = new ScreeningStore(api);
    await store.createSession({
      corpus_id: corpusId,
      sr_id: "SR2",
      seed_doc_ids: ["SR2-002"],
      model: "mmatch",
    });
    const first = store.state.page!.entries[0]!.doc_id;
    store.queueLabel(first, "irrelevant");
    await store.submitAndRerank(); // mid-session state on the server

    const reloaded = new ScreeningStore(api);
    await reloaded.load(store.state.sessionId!);
    const direct = await api.ranking(store.state.sessionId!);
    expect(JSON.stringify(reloaded.state.page)).toBe(JSON.stringify(direct));

    // the rendered queue is a pure function of that payload
    const html = renderQueue(reloaded.state);
    for (const entry of direct.entries) {
      expect(html).toContain(`data-doc="${entry.doc_id}"`);
      expect(html).toContain(`score ${String(entry.score)}`);
    }
  }, 120_000);
});
