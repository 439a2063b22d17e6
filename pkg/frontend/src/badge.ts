export const BADGE_ATTR = "data-overlay-badge";
export const RETRY_ATTR = "data-overlay-retry";

// Styles ride inline so host pages need no extra stylesheet.
const BADGE_CSS =
  "display:inline-block;margin-left:0.5em;padding:0.1em 0.5em;" +
  "background:#b00020;color:#fff;border-radius:3px;font-size:0.8em;" +
  "font-family:sans-serif;cursor:default;";
const RETRY_CSS =
  "display:inline-block;margin-left:0.5em;padding:0;border:none;" +
  "background:none;color:#888;font-size:0.75em;text-decoration:underline;" +
  "cursor:pointer;";

/** Marks a post as malicious. Repeat calls leave the existing badge alone. */
export function applyBadge(element: Element, score?: number): void {
  if (element.querySelector(`[${BADGE_ATTR}]`)) return;
  const badge = element.ownerDocument.createElement("span");
  badge.setAttribute(BADGE_ATTR, "");
  badge.setAttribute("style", BADGE_CSS);
  badge.textContent = "⚠ flagged";
  badge.title = score === undefined ? "malicious" : `malicious (score ${score.toFixed(2)})`;
  element.appendChild(badge);
}

export function hasBadge(element: Element): boolean {
  return element.querySelector(`[${BADGE_ATTR}]`) !== null;
}

/**
 * Offers a retry link on a post whose classification failed. The link removes
 * itself when clicked, so a retry that fails again gets a fresh one.
 */
export function applyRetryMarker(element: Element, onRetry: () => void): void {
  if (element.querySelector(`[${RETRY_ATTR}]`)) return;
  const marker = element.ownerDocument.createElement("button");
  marker.setAttribute(RETRY_ATTR, "");
  marker.setAttribute("type", "button");
  marker.setAttribute("style", RETRY_CSS);
  marker.textContent = "check failed, retry";
  marker.addEventListener("click", () => {
    marker.remove();
    onRetry();
  });
  element.appendChild(marker);
}

export function hasRetryMarker(element: Element): boolean {
  return element.querySelector(`[${RETRY_ATTR}]`) !== null;
}
