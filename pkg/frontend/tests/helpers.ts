import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { DEFAULT_CONFIG, type AppConfig } from "../src/config.js";
import { StubApi } from "./stub_api.js";

export interface Harness {
  app: App;
  stub: StubApi;
  root: HTMLElement;
}

export async function mountApp(overrides: Partial<AppConfig> = {}): Promise<Harness> {
  const stub = new StubApi();
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const config: AppConfig = { ...DEFAULT_CONFIG, tileUrl: "", ...overrides };
  const app = new App(root, new ApiClient("http://stub.test", stub.fetch), config);
  await app.init();
  return { app, stub, root };
}

export function markerIds(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll(".marker")).map((el) =>
    Number((el as HTMLElement).dataset["postId"]),
  );
}
