import type { OverlayConfig, Verdict } from "./types.js";

export async function classifyPost(payload: unknown, config: OverlayConfig): Promise<Verdict> {
  const controller = new AbortController();
  const timer = setTimeout(() => controller.abort(), config.requestTimeoutMs);
  try {
    const res = await fetch(`${config.serviceUrl}/classify`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
      signal: controller.signal,
    });
    if (!res.ok) throw new Error(`classify failed: ${res.status}`);
    const body = (await res.json()) as { label?: string; score?: number };
    if (body.label !== "malicious" && body.label !== "legitimate") {
      throw new Error("classify response carries no label");
    }
    return { label: body.label, score: body.score };
  } finally {
    clearTimeout(timer);
  }
}

export async function serviceHealthy(config: OverlayConfig): Promise<boolean> {
  try {
    const res = await fetch(`${config.serviceUrl}/healthz`);
    return res.ok;
  } catch {
    return false;
  }
}
