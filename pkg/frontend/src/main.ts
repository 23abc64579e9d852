import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { loadConfig } from "./config.js";

async function bootstrap(): Promise<void> {
  const config = await loadConfig();
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = new App(root, new ApiClient(config.apiBase), config);
  await app.init();
}

void bootstrap();
