/** Browser bootstrap: the editor is served by the engine under /app, so
 * the API lives at the same origin. A bearer token is asked for once and
 * kept in localStorage. */

import { EngineClient } from "./api.js";
import { initApp } from "./app.js";

function resolveToken(): string {
  const stored = window.localStorage.getItem("lava-token");
  if (stored) return stored;
  const entered = window.prompt("Bearer token (your user id on self-identified installs)") ?? "";
  if (entered) window.localStorage.setItem("lava-token", entered);
  return entered;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const client = new EngineClient(window.location.origin, resolveToken());
  await initApp(root, client);
}

void boot();
