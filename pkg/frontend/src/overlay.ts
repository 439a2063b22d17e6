/**
 * Feed overlay controller.
 *
 * Walks the feed for annotated posts, asks the classification service about
 * each one, and badges the ones it calls malicious. Every post moves through
 * exactly one status transition, pending to a terminal state, and a single
 * serialized scan queue absorbs DOM mutation bursts so scans never interleave.
 */
import { applyBadge, applyRetryMarker } from "./badge.js";
import { classifyPost } from "./client.js";
import { scanFeed } from "./scan.js";
import type { FeedPost, OverlayConfig, PostStatus } from "./types.js";

const TERMINAL: ReadonlySet<PostStatus> = new Set(["legitimate", "malicious", "error"]);

export class FeedOverlay {
  private readonly statuses = new Map<string, PostStatus>();
  private observer: MutationObserver | null = null;
  private scanChain: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: ParentNode,
    private readonly config: OverlayConfig,
  ) {}

  statusOf(id: string): PostStatus | undefined {
    return this.statuses.get(id);
  }

  statusSnapshot(): ReadonlyMap<string, PostStatus> {
    return new Map(this.statuses);
  }

  /** Queues a scan behind any scan already running; resolves when it settles. */
  scanOnce(): Promise<void> {
    this.scanChain = this.scanChain.then(() => this.runScan());
    return this.scanChain;
  }

  /** Resolves once every scan queued so far has finished. */
  settled(): Promise<void> {
    return this.scanChain;
  }

  start(): void {
    if (this.observer) return;
    void this.scanOnce();
    this.observer = new MutationObserver(() => void this.scanOnce());
    this.observer.observe(this.root as Node, { childList: true, subtree: true });
  }

  stop(): void {
    this.observer?.disconnect();
    this.observer = null;
  }

  private async runScan(): Promise<void> {
    const fresh = scanFeed(this.root).filter((post) => !this.statuses.has(post.id));
    for (const post of fresh) {
      this.statuses.set(post.id, "pending");
    }
    await this.classifyBatch(fresh);
  }

  private async classifyBatch(posts: FeedPost[]): Promise<void> {
    // Fixed worker pool over a shared queue caps requests in flight.
    const queue = [...posts];
    const width = Math.max(1, this.config.maxInFlight);
    const workers = Array.from({ length: width }, async () => {
      for (;;) {
        const post = queue.shift();
        if (post === undefined) return;
        await this.classifyOne(post);
      }
    });
    await Promise.all(workers);
  }

  private async classifyOne(post: FeedPost): Promise<void> {
    if (post.payload === null) {
      // Broken annotation: no request to make, and a retry cannot fix it.
      this.conclude(post.id, "error");
      return;
    }
    try {
      const verdict = await classifyPost(post.payload, this.config);
      if (
        verdict.label === "malicious" &&
        (verdict.score === undefined || verdict.score >= this.config.scoreThreshold)
      ) {
        applyBadge(post.element, verdict.score);
      }
      this.conclude(post.id, verdict.label);
    } catch {
      this.conclude(post.id, "error");
      applyRetryMarker(post.element, () => this.enqueueRetry(post));
    }
  }

  /** Only a pending post may conclude; terminal statuses never regress. */
  private conclude(id: string, status: PostStatus): void {
    if (TERMINAL.has(this.statuses.get(id) ?? "pending")) return;
    this.statuses.set(id, status);
  }

  /** A retry restarts the lifecycle, then rides the scan chain like any scan. */
  private enqueueRetry(post: FeedPost): void {
    this.statuses.set(post.id, "pending");
    this.scanChain = this.scanChain.then(() => this.classifyOne(post));
  }
}

export function startOverlay(root: ParentNode, config: OverlayConfig): FeedOverlay {
  const overlay = new FeedOverlay(root, config);
  overlay.start();
  return overlay;
}
