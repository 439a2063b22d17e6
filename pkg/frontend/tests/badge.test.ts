import { beforeEach, describe, expect, it, vi } from "vitest";
import {
  BADGE_ATTR,
  RETRY_ATTR,
  applyBadge,
  applyRetryMarker,
  hasBadge,
  hasRetryMarker,
} from "../src/badge.js";

describe("badges", () => {
  let post: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "";
    post = document.createElement("article");
    document.body.appendChild(post);
  });

  it("adds one badge with the score in the hover text", () => {
    applyBadge(post, 0.97);
    const badges = post.querySelectorAll(`[${BADGE_ATTR}]`);
    expect(badges).toHaveLength(1);
    expect(badges[0]?.getAttribute("title")).toBe("malicious (score 0.97)");
    expect(hasBadge(post)).toBe(true);
  });

  it("never stacks a second badge on repeat calls", () => {
    applyBadge(post, 0.9);
    applyBadge(post, 0.8);
    applyBadge(post);
    expect(post.querySelectorAll(`[${BADGE_ATTR}]`)).toHaveLength(1);
  });

  it("labels the badge without a score when none is given", () => {
    applyBadge(post);
    expect(post.querySelector(`[${BADGE_ATTR}]`)?.getAttribute("title")).toBe("malicious");
  });

  it("offers a retry marker that fires once and removes itself", () => {
    const onRetry = vi.fn();
    applyRetryMarker(post, onRetry);
    applyRetryMarker(post, onRetry);
    const markers = post.querySelectorAll(`[${RETRY_ATTR}]`);
    expect(markers).toHaveLength(1);
    (markers[0] as HTMLElement).click();
    expect(onRetry).toHaveBeenCalledTimes(1);
    expect(hasRetryMarker(post)).toBe(false);
  });
});
