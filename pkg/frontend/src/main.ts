import { LineageGraph } from "./graph";
import { mountExplorer } from "./render";

/**
 * Data loading order: the inline JSON block first (written by `extract`
 * into index.html and by the server into the viewer page), then a fetch of
 * /api/lineage for the served mode. An unsubstituted template placeholder
 * is not valid JSON, so it falls through to the fetch path naturally.
 */
function inlineDocument(): unknown | null {
  const holder = document.getElementById("lineage-data");
  if (holder === null) {
    return null;
  }
  const text = (holder.textContent ?? "").trim();
  if (text === "") {
    return null;
  }
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}

async function loadDocument(): Promise<unknown> {
  const inline = inlineDocument();
  if (inline !== null) {
    return inline;
  }
  const response = await fetch("/api/lineage");
  if (!response.ok) {
    throw new Error(`GET /api/lineage failed with status ${response.status}`);
  }
  return response.json();
}

function fail(root: HTMLElement, error: unknown): void {
  root.textContent = "";
  const panel = document.createElement("div");
  panel.className = "load-error";
  const head = document.createElement("p");
  head.textContent = "Could not load the lineage document.";
  const detail = document.createElement("pre");
  detail.textContent = error instanceof Error ? error.message : String(error);
  const hintText = document.createElement("p");
  hintText.textContent =
    "Run `lineage-forge extract <scripts>` and open the produced index.html, " +
    "or `lineage-forge serve` and reload this page.";
  panel.appendChild(head);
  panel.appendChild(detail);
  panel.appendChild(hintText);
  root.appendChild(panel);
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  try {
    mountExplorer(root, LineageGraph.parse(await loadDocument()));
  } catch (error) {
    fail(root, error);
  }
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", () => {
    void start();
  });
} else {
  void start();
}
