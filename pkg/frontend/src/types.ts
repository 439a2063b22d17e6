export type PostStatus = "pending" | "legitimate" | "malicious" | "error";

export interface OverlayConfig {
  /** Base URL of the classification service, no trailing slash. */
  serviceUrl: string;
  /** Malicious verdicts scoring below this are recorded but not badged. */
  scoreThreshold: number;
  /** Upper bound on concurrent classification requests. */
  maxInFlight: number;
  /** Per-request timeout in milliseconds. */
  requestTimeoutMs: number;
}

export const defaultConfig = (serviceUrl: string): OverlayConfig => ({
  serviceUrl,
  scoreThreshold: 0.5,
  maxInFlight: 4,
  requestTimeoutMs: 5000,
});

export interface FeedPost {
  id: string;
  /** Parsed data-post-json payload; null when the attribute held broken JSON. */
  payload: unknown;
  element: Element;
}

export interface Verdict {
  label: "malicious" | "legitimate";
  score?: number;
}
