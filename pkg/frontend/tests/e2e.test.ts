// @vitest-environment node
//
// End to end: train a small model through the CLI, start the real service,
// and point the overlay at the demo feed page rendered in jsdom.
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { JSDOM } from "jsdom";
import { afterAll, beforeAll, expect, it } from "vitest";
import { BADGE_ATTR, RETRY_ATTR } from "../src/badge.js";
import { FeedOverlay } from "../src/overlay.js";
import type { OverlayConfig } from "../src/types.js";

const FRONTEND_ROOT = fileURLToPath(new URL("..", import.meta.url));
const PORT = 8743;
const SERVICE = `http://127.0.0.1:${PORT}`;
const BUDGET_S = 60;
const startedAt = Date.now();

let service: ChildProcess | undefined;
let workDir: string;

const overlayConfig = (serviceUrl: string): OverlayConfig => ({
  serviceUrl,
  scoreThreshold: 0.5,
  maxInFlight: 4,
  requestTimeoutMs: 5000,
});

function cli(...args: string[]): void {
  execFileSync("python3", ["-m", "sentinel.cli", ...args], { stdio: "pipe" });
}

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const res = await fetch(`${SERVICE}/healthz`, { signal: AbortSignal.timeout(1000) });
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("service never became healthy");
}

function loadFeedPage(): JSDOM {
  const html = readFileSync(join(FRONTEND_ROOT, "demo", "feed.html"), "utf8");
  return new JSDOM(html);
}

function feedElements(document: Document): Element[] {
  return [...document.querySelectorAll("[data-post-id][data-post-json]")];
}

async function serviceLabel(payload: unknown): Promise<string> {
  const res = await fetch(`${SERVICE}/classify`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
  expect(res.status).toBe(200);
  const body = (await res.json()) as { label: string };
  return body.label;
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "overlay-e2e-"));
  const corpus = join(workDir, "corpus.jsonl");
  const snapshot = join(workDir, "snapshot.json");
  const labeled = join(workDir, "labeled.jsonl");
  const vectors = join(workDir, "vectors.jsonl");
  const model = join(workDir, "model.json");
  cli("generate", "--malicious", "250", "--legitimate", "250", "--seed", "21",
    "--out", corpus, "--snapshot-out", snapshot);
  cli("label", "--in", corpus, "--snapshot", snapshot, "--out", labeled);
  cli("extract", "--in", labeled, "--out", vectors);
  cli("train", "--in", vectors, "--classifier", "dt", "--seed", "5", "--model", model);
  service = spawn(
    "python3",
    ["-m", "sentinel.cli", "serve", "--model", model, "--store", labeled,
      "--addr", `127.0.0.1:${PORT}`],
    { stdio: "ignore" },
  );
  await waitForHealth();
});

afterAll(() => {
  service?.kill("SIGTERM");
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

async function waitFor(predicate: () => boolean, ms = 5000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("waitFor timed out");
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

it("overlay against the live service badges exactly what the service flags", async () => {
  let verdict = "FAIL";
  try {
    const dom = loadFeedPage();
    const document = dom.window.document;
    globalThis.MutationObserver = dom.window.MutationObserver;

    // Ask the service directly first so the overlay has ground truth to match.
    const posts = feedElements(document);
    expect(posts).toHaveLength(6);
    const expected = new Map<string, string>();
    for (const element of posts) {
      const id = element.getAttribute("data-post-id")!;
      const payload = JSON.parse(element.getAttribute("data-post-json")!);
      expected.set(id, await serviceLabel(payload));
    }
    const labels = [...expected.values()];
    expect(labels).toContain("malicious");
    expect(labels).toContain("legitimate");

    const overlay = new FeedOverlay(document, overlayConfig(SERVICE));
    overlay.start();
    await overlay.settled();

    for (const element of posts) {
      const id = element.getAttribute("data-post-id")!;
      const badges = element.querySelectorAll(`[${BADGE_ATTR}]`);
      expect(overlay.statusOf(id)).toBe(expected.get(id));
      expect(badges).toHaveLength(expected.get(id) === "malicious" ? 1 : 0);
    }

    // Rescans must not stack badges or refetch.
    await overlay.scanOnce();
    await overlay.scanOnce();
    for (const element of posts) {
      expect(element.querySelectorAll(`[${BADGE_ATTR}]`).length).toBeLessThanOrEqual(1);
    }

    // A post appended later arrives through the mutation observer.
    const template = posts[1]!;
    const late = document.createElement("article");
    late.setAttribute("data-post-id", "late-1");
    late.setAttribute("data-post-json", template.getAttribute("data-post-json")!);
    document.getElementById("feed")!.appendChild(late);
    await waitFor(() => overlay.statusOf("late-1") !== undefined);
    await overlay.settled();
    expect(overlay.statusOf("late-1")).toBe(expected.get(template.getAttribute("data-post-id")!));
    overlay.stop();

    // Outage: a dead port turns into error statuses and a usable page.
    const downDom = loadFeedPage();
    const downDoc = downDom.window.document;
    const down = new FeedOverlay(downDoc, overlayConfig("http://127.0.0.1:9"));
    await down.scanOnce();
    const downPosts = feedElements(downDoc);
    expect(downPosts).toHaveLength(6);
    for (const element of downPosts) {
      const id = element.getAttribute("data-post-id")!;
      expect(down.statusOf(id)).toBe("error");
      expect(element.querySelectorAll(`[${BADGE_ATTR}]`)).toHaveLength(0);
      expect(element.querySelectorAll(`[${RETRY_ATTR}]`)).toHaveLength(1);
      expect(element.isConnected).toBe(true);
    }

    verdict = "PASS";
  } finally {
    const elapsed = (Date.now() - startedAt) / 1000;
    process.stdout.write(
      `[acceptance] 11 feed overlay end to end: ${verdict} (${elapsed.toFixed(2)}s / ${BUDGET_S}s budget)\n`,
    );
  }
  expect((Date.now() - startedAt) / 1000).toBeLessThan(BUDGET_S);
});
