import type { FeedPost } from "./types.js";

/** Flagged onto an element once a scan has picked it up, so later scans skip it. */
export const SEEN_ATTR = "data-overlay-seen";

const POST_SELECTOR = "[data-post-id][data-post-json]";

/**
 * Collects every annotated post the overlay has not seen yet. Each element
 * is claimed by setting SEEN_ATTR before anything async happens, which keeps
 * a post from being returned twice even if scans overlap. Posts whose JSON
 * attribute fails to parse come back with a null payload so the caller can
 * surface an error state instead of silently dropping them.
 */
export function scanFeed(root: ParentNode): FeedPost[] {
  const found: FeedPost[] = [];
  const ids = new Set<string>();
  for (const element of root.querySelectorAll(POST_SELECTOR)) {
    if (element.hasAttribute(SEEN_ATTR)) continue;
    element.setAttribute(SEEN_ATTR, "");
    const id = element.getAttribute("data-post-id") ?? "";
    if (id === "" || ids.has(id)) continue;
    ids.add(id);
    let payload: unknown = null;
    try {
      payload = JSON.parse(element.getAttribute("data-post-json") ?? "");
    } catch {
      payload = null;
    }
    found.push({ id, payload, element });
  }
  return found;
}
