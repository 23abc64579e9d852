// Integration smoke check: run the real App (under jsdom) against a live
// backend. Usage: node dist-live-check.mjs http://127.0.0.1:8124
// Exits non-zero if any step fails.

import { JSDOM } from "jsdom";

const dom = new JSDOM("<!doctype html><html><body></body></html>", {
  url: "http://localhost/",
  pretendToBeVisual: true,
});
const g = globalThis as Record<string, unknown>;
g["window"] = dom.window;
g["document"] = dom.window.document;
g["HTMLElement"] = dom.window.HTMLElement;
g["Image"] = dom.window.Image;
g["Event"] = dom.window.Event;
g["MouseEvent"] = dom.window.MouseEvent;

const { ApiClient } = await import("../src/api.js");
const { App } = await import("../src/app.js");
const { DEFAULT_CONFIG } = await import("../src/config.js");

const base = process.argv[2] ?? "http://127.0.0.1:8124";

function fail(message: string): never {
  console.error(`FAIL: ${message}`);
  process.exit(1);
}

const root = dom.window.document.createElement("div");
dom.window.document.body.appendChild(root);
const app = new App(root, new ApiClient(base), { ...DEFAULT_CONFIG, apiBase: base });
await app.init();
await app.idle();

const total = app.lastCollection?.features.length ?? 0;
if (total < 1) fail("no features rendered from live API");
if (app.map.markerCount() !== app.lastCollection!.features.filter((f) => f.geometry).length) {
  fail("marker count mismatch");
}
console.log(`markers: ${app.map.markerCount()} of ${total} features`);

app.toggles().cime.click();
await app.idle();
const nativeOnly = app.map.markerCount();
app.toggles().native.click();
await app.idle();
if (app.map.markerCount() !== 0) fail("both layers off must render nothing");
app.toggles().native.click();
app.toggles().cime.click();
await app.idle();
console.log(`layer toggles ok (native-only ${nativeOnly} markers)`);

const first = app.lastCollection!.features.find((f) => f.geometry);
if (!first) fail("no located feature to validate");
await app.openDetail(first.properties.post_id);
const btn = app.detailPanel()?.querySelector(".validate-btn") as HTMLButtonElement | null;
if (!btn) fail("validate button missing");
btn.click();
await app.idle();
const badge = app.detailPanel()?.querySelector(".badge.validated-state");
if (!badge?.classList.contains("on")) fail("validation did not round-trip");
console.log(`validated post ${first.properties.post_id} through the UI`);

console.log("live check passed");
process.exit(0);
