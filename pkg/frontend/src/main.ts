// App bootstrap: view selection, S/E/I/R controls, tooltips, redaction and
// monitoring click-through. All data arrives read-only from `body serve`.

import { importPositions, exportPositions, loadPositions, savePositions } from "./layout.js";
import { applyPositions, currentPositions, renderView, resetLayout, type RenderedView } from "./render.js";
import { SchemaError, validateView, validateViewIndex } from "./schema.js";
import { navigationTarget, tooltipFields } from "./tooltip.js";
import type { ViewDescriptor, ViewNode } from "./types.js";

const URL_TEMPLATE_KEY = "body-viewer.monitoring-url";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

const statusLine = () => el<HTMLElement>("status");

function setStatus(text: string, isError = false): void {
  statusLine().textContent = text;
  statusLine().className = isError ? "status error" : "status";
}

async function fetchJson(path: string): Promise<unknown> {
  const response = await fetch(path);
  if (!response.ok) throw new Error(`${path}: HTTP ${response.status}`);
  return response.json();
}

interface AppState {
  descriptor: ViewDescriptor | null;
  rendered: RenderedView | null;
  redact: boolean;
}

const state: AppState = { descriptor: null, rendered: null, redact: false };

function showTooltip(node: ViewNode, x: number, y: number): void {
  const tooltip = el<HTMLElement>("tooltip");
  tooltip.innerHTML = "";
  const title = document.createElement("div");
  title.className = "tooltip-kind";
  title.textContent = node.kind.replaceAll("_", " ");
  tooltip.appendChild(title);
  for (const [label, value] of tooltipFields(node, state.redact)) {
    const row = document.createElement("div");
    const key = document.createElement("span");
    key.textContent = label;
    const val = document.createElement("b");
    val.textContent = value;
    row.append(key, val);
    tooltip.appendChild(row);
  }
  tooltip.style.left = `${x + 14}px`;
  tooltip.style.top = `${y + 14}px`;
  tooltip.style.display = "block";
}

function hideTooltip(): void {
  el<HTMLElement>("tooltip").style.display = "none";
}

function wireGraphEvents(rendered: RenderedView): void {
  rendered.cy.on("mouseover", "node", (event: any) => {
    const node: ViewNode = event.target.data("node");
    const pos = event.renderedPosition ?? event.target.renderedPosition();
    showTooltip(node, pos.x, pos.y);
  });
  rendered.cy.on("mousemove", "node", (event: any) => {
    const pos = event.renderedPosition;
    if (pos) {
      const tooltip = el<HTMLElement>("tooltip");
      tooltip.style.left = `${pos.x + 14}px`;
      tooltip.style.top = `${pos.y + 14}px`;
    }
  });
  rendered.cy.on("mouseout", "node", hideTooltip);
  rendered.cy.on("tap", "node", (event: any) => {
    const node: ViewNode = event.target.data("node");
    const template = (el<HTMLInputElement>("url-template").value || "").trim() || null;
    const target = navigationTarget(node, template);
    if (target) window.open(target, "_blank");
  });
}

async function loadView(descriptor: ViewDescriptor): Promise<void> {
  hideTooltip();
  try {
    const payload = validateView(await fetchJson(`/views/${descriptor.file}`));
    state.descriptor = descriptor;
    state.rendered = renderView(el("graph"), payload);
    wireGraphEvents(state.rendered);
    const saved = loadPositions(descriptor.id);
    if (saved) {
      applyPositions(state.rendered, saved);
      setStatus(`${descriptor.label}: ${payload.nodes.length} nodes, saved layout applied`);
    } else {
      setStatus(`${descriptor.label}: ${payload.nodes.length} nodes, ${payload.edges.length} edges`);
    }
  } catch (error) {
    if (error instanceof SchemaError) {
      setStatus(`view rejected by schema check - ${error.message}`, true);
    } else {
      setStatus(String(error), true);
    }
  }
}

function requireRendered(): RenderedView | null {
  if (!state.rendered || !state.descriptor) {
    setStatus("no view loaded", true);
    return null;
  }
  return state.rendered;
}

function onSave(): void {
  const rendered = requireRendered();
  if (!rendered || !state.descriptor) return;
  const ok = savePositions(state.descriptor.id, currentPositions(rendered));
  setStatus(ok ? `layout saved for ${state.descriptor.label}` : "layout save failed", !ok);
}

function onExport(): void {
  const rendered = requireRendered();
  if (!rendered || !state.descriptor) return;
  const file = exportPositions(state.descriptor.id, currentPositions(rendered));
  const blob = new Blob([JSON.stringify(file, null, 2)], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `layout_${state.descriptor.id.replaceAll(":", "_")}.json`;
  link.click();
  URL.revokeObjectURL(link.href);
  setStatus(`layout exported (${Object.keys(file.positions).length} positions)`);
}

function onImportFile(file: File): void {
  const rendered = requireRendered();
  if (!rendered) return;
  file.text().then((text) => {
    try {
      const result = importPositions(JSON.parse(text), rendered.nodeIds);
      applyPositions(rendered, result.applied);
      const ignored = result.ignored.length
        ? `; ignored ${result.ignored.length} unknown node id(s): ${result.ignored.slice(0, 5).join(", ")}${result.ignored.length > 5 ? "..." : ""}`
        : "";
      setStatus(`layout imported (${Object.keys(result.applied).length} positions)${ignored}`, result.ignored.length > 0);
    } catch (error) {
      setStatus(`import rejected, nothing applied - ${error instanceof Error ? error.message : error}`, true);
    }
  });
}

function onReset(): void {
  const rendered = requireRendered();
  if (!rendered || !state.descriptor) return;
  resetLayout(rendered);
  setStatus(`automatic layout restored for ${state.descriptor.label}`);
}

async function boot(): Promise<void> {
  const selector = el<HTMLSelectElement>("view-select");
  el<HTMLButtonElement>("btn-save").addEventListener("click", onSave);
  el<HTMLButtonElement>("btn-export").addEventListener("click", onExport);
  el<HTMLButtonElement>("btn-reset").addEventListener("click", onReset);
  const importInput = el<HTMLInputElement>("import-file");
  el<HTMLButtonElement>("btn-import").addEventListener("click", () => importInput.click());
  importInput.addEventListener("change", () => {
    if (importInput.files?.[0]) onImportFile(importInput.files[0]);
    importInput.value = "";
  });
  const redact = el<HTMLInputElement>("redact-toggle");
  redact.addEventListener("change", () => {
    state.redact = redact.checked;
  });
  const urlTemplate = el<HTMLInputElement>("url-template");
  urlTemplate.value = localStorage.getItem(URL_TEMPLATE_KEY) ?? "";
  urlTemplate.addEventListener("change", () => {
    localStorage.setItem(URL_TEMPLATE_KEY, urlTemplate.value);
  });

  try {
    const index = validateViewIndex(await fetchJson("/views/index.json"));
    if (index.views.length === 0) {
      setStatus("no views exported yet; run `body color` first", true);
      return;
    }
    for (const descriptor of index.views) {
      const option = document.createElement("option");
      option.value = descriptor.id;
      option.textContent = descriptor.id === "srv" ? `⌂ ${descriptor.label}` : descriptor.label;
      selector.appendChild(option);
    }
    selector.addEventListener("change", () => {
      const chosen = index.views.find((v) => v.id === selector.value);
      if (chosen) void loadView(chosen);
    });
    await loadView(index.views[0]);
  } catch (error) {
    setStatus(`could not load view index - ${error instanceof Error ? error.message : error}`, true);
  }
}

void boot();
