import { ExpertConsole } from "./app";

function resolveBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get("api");
  if (fromQuery) return fromQuery.replace(/\/$/, "");
  return `${window.location.protocol}//${window.location.host}`;
}

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const console_ = new ExpertConsole(root, resolveBaseUrl());
console_.render();
void console_.start();
