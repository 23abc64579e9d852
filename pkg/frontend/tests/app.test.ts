import { afterEach, describe, expect, it, vi } from "vitest";

import { layerParam } from "../src/state.js";
import { markerIds, mountApp } from "./helpers.js";

// Default viewport (Devon, zoom 10) excludes stub post 5 at (10, 10); post 4
// is unresolved (no geometry) and post 6 sits at the slider's lower bound.
const VISIBLE_ALL = [1, 2, 3, 6];
const VISIBLE_NATIVE = [1, 6];
const VISIBLE_CIME = [2, 3];

afterEach(() => {
  vi.useRealTimers();
});

describe("layer toggles", () => {
  it("maps toggle pairs onto the API layer parameter", () => {
    expect(layerParam({ showNative: true, showCime: true })).toBe("all");
    expect(layerParam({ showNative: true, showCime: false })).toBe("native");
    expect(layerParam({ showNative: false, showCime: true })).toBe("cime");
    expect(layerParam({ showNative: false, showCime: false })).toBeNull();
  });

  it("renders one marker per located feature", async () => {
    const { app, root } = await mountApp();
    expect(markerIds(root).sort()).toEqual(VISIBLE_ALL.sort());
    expect(app.map.markerCount()).toBe(app.lastCollection?.features.filter((f) => f.geometry).length);
  });

  it("toggling the inferred layer off removes exactly the cime markers", async () => {
    const { app, root } = await mountApp();
    const before = new Set(markerIds(root));
    app.toggles().cime.click();
    await app.idle();
    const after = new Set(markerIds(root));
    expect([...after].sort()).toEqual(VISIBLE_NATIVE.sort());
    const removed = [...before].filter((id) => !after.has(id)).sort();
    expect(removed).toEqual(VISIBLE_CIME.sort());
  });

  it("native-only and cime-only partition the joint layer", async () => {
    const { app, root, stub } = await mountApp();
    app.toggles().cime.click();
    await app.idle();
    const nativeIds = markerIds(root);
    app.toggles().cime.click();
    app.toggles().native.click();
    await app.idle();
    const cimeIds = markerIds(root);
    expect([...nativeIds, ...cimeIds].sort()).toEqual(VISIBLE_ALL.sort());
    expect(nativeIds.filter((id) => cimeIds.includes(id))).toEqual([]);
    expect(stub.lastPostsUrl?.searchParams.get("layer")).toBe("cime");
  });

  it("both toggles off renders nothing and issues no request", async () => {
    const { app, root, stub } = await mountApp();
    const requestsBefore = stub.calls.posts;
    app.toggles().native.click();
    await app.idle();
    app.toggles().cime.click();
    await app.idle();
    expect(markerIds(root)).toEqual([]);
    // The native-only refresh fetched once; the both-off refresh must not.
    expect(stub.calls.posts).toBe(requestsBefore + 1);
  });
});

describe("time window", () => {
  it("shrinking the window never adds markers", async () => {
    vi.useFakeTimers();
    const { app, root } = await mountApp();
    let previous = markerIds(root).length;
    const inputs = app.timeInputs();
    const from = Number(inputs.from.min);
    const to = Number(inputs.to.max);
    const span = to - from;
    for (const shrink of [0.2, 0.5, 0.8]) {
      inputs.from.value = String(Math.round(from + (span * shrink) / 2));
      inputs.to.value = String(Math.round(to - (span * shrink) / 2));
      inputs.from.dispatchEvent(new Event("input"));
      await vi.advanceTimersByTimeAsync(300);
      await app.idle();
      const count = markerIds(root).length;
      expect(count).toBeLessThanOrEqual(previous);
      previous = count;
    }
  });

  it("slider bounds come from the stats time extent", async () => {
    const { app, stub } = await mountApp();
    expect(stub.calls.stats).toBe(1);
    const inputs = app.timeInputs();
    expect(Number(inputs.from.min)).toBe(1_391_600_000 - 50_000);
    expect(Number(inputs.to.max)).toBe(1_391_600_000 + 300);
  });
});

describe("fetch-and-render resilience", () => {
  it("keeps the previous layer and shows a banner on API errors", async () => {
    const { app, root, stub } = await mountApp();
    const before = markerIds(root);
    expect(app.bannerMessage()).toBeNull();
    stub.failNextPosts = true;
    await app.refreshNow();
    expect(markerIds(root)).toEqual(before);
    expect(app.bannerMessage()).toContain("stub failure");
    await app.refreshNow(); // next success clears the banner
    expect(app.bannerMessage()).toBeNull();
  });

  it("a newer request supersedes a slower in-flight one (latest wins)", async () => {
    const { app, root, stub } = await mountApp();
    stub.postsDelayMs = [40, 0];
    const slow = app.refreshNow(); // layer=all, delayed
    app.state.showCime = false;
    const fast = app.refreshNow(); // layer=native, immediate
    await Promise.allSettled([slow, fast]);
    await new Promise((resolve) => setTimeout(resolve, 60));
    expect(markerIds(root).sort()).toEqual(VISIBLE_NATIVE.sort());
  });

  it("marker count always equals the located features of the last success", async () => {
    const { app } = await mountApp();
    for (const [native, cime] of [
      [true, true],
      [true, false],
      [false, true],
    ] as const) {
      app.state.showNative = native;
      app.state.showCime = cime;
      await app.refreshNow();
      const located = app.lastCollection?.features.filter((f) => f.geometry).length ?? 0;
      expect(app.map.markerCount()).toBe(located);
    }
  });

  it("displays rank scores verbatim from the API payload", async () => {
    const { app, root } = await mountApp();
    const listScores = Array.from(root.querySelectorAll(".ranked-score")).map(
      (el) => el.textContent,
    );
    const apiScores = (app.lastCollection?.features ?? []).map((f) =>
      f.properties.rank_score.toFixed(3),
    );
    expect(listScores).toEqual(apiScores.slice(0, listScores.length));
  });
});
