/** Entry point: wire the explorer to the page and the service. */

import { ApiClient } from "./api.js";
import { browserUrlSync, ReviewExplorer } from "./app.js";

const API_BASE = (window as { API_BASE_URL?: string }).API_BASE_URL ?? "http://127.0.0.1:8080";

function productIdFromUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("product") ?? "p-1";
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const explorer = new ReviewExplorer(
    root,
    new ApiClient(API_BASE),
    productIdFromUrl(),
    browserUrlSync(),
  );
  await explorer.start();
}

document.addEventListener("DOMContentLoaded", () => void boot());
