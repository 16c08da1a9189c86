/**
 * DOM wiring for the review UI. All behaviour lives in the view-model and
 * render modules; this file only moves strings into elements and events
 * back into model calls.
 */

import { ApiClient } from "./api.js";
import { renderBadge, renderGraph, renderLegend } from "./graph.js";
import { QueueFilter, ReviewModel, renderQueue, renderSummary } from "./review.js";

const api = new ApiClient("");
const model = new ReviewModel(api);

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const banner = element<HTMLDivElement>("banner");
const queue = element<HTMLDivElement>("queue");
const summary = element<HTMLParagraphElement>("summary");
const filterSelect = element<HTMLSelectElement>("filter");
const canvas = element<HTMLDivElement>("canvas");
const badge = element<HTMLSpanElement>("badge");
const legend = element<HTMLDivElement>("legend");

function showError(message: string | null): void {
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
  } else {
    banner.hidden = false;
    banner.textContent = message;
  }
}

function renderReview(): void {
  showError(model.state.error);
  summary.textContent = renderSummary(model.state.items);
  queue.innerHTML = renderQueue(model.state);
}

async function refreshReview(): Promise<void> {
  await model.refresh();
  renderReview();
}

async function refreshGraph(): Promise<void> {
  try {
    const [graphPayload, violations] = await Promise.all([api.graph(), api.validate()]);
    badge.innerHTML = renderBadge(violations);
    legend.innerHTML = renderLegend(graphPayload);
    canvas.innerHTML = renderGraph(graphPayload);
    showError(null);
  } catch (exc) {
    showError(exc instanceof Error ? exc.message : String(exc));
  }
}

queue.addEventListener("click", (event) => {
  const target = event.target as HTMLElement | null;
  const button = target?.closest<HTMLButtonElement>("button[data-action]");
  if (!button) {
    return;
  }
  const id = button.dataset.id;
  if (id === undefined) {
    return;
  }
  const raw = button.dataset.concept;
  const concept = raw === undefined ? null : Number.parseInt(raw, 10);
  const status = button.dataset.action === "reject" ? "rejected" : "accepted";
  void model
    .decide(id, status, status === "rejected" ? null : concept)
    .then(() => renderReview());
});

filterSelect.addEventListener("change", () => {
  model.setFilter(filterSelect.value as QueueFilter);
  renderReview();
});

element<HTMLButtonElement>("reload-queue").addEventListener("click", () => {
  void refreshReview();
});

element<HTMLButtonElement>("reload-graph").addEventListener("click", () => {
  void refreshGraph();
});

for (const tab of document.querySelectorAll<HTMLButtonElement>("nav button[data-tab]")) {
  tab.addEventListener("click", () => {
    for (const other of document.querySelectorAll<HTMLButtonElement>("nav button[data-tab]")) {
      other.classList.toggle("active", other === tab);
    }
    const wanted = tab.dataset.tab;
    element<HTMLElement>("review-view").hidden = wanted !== "review";
    element<HTMLElement>("graph-view").hidden = wanted !== "graph";
    if (wanted === "graph") {
      void refreshGraph();
    }
  });
}

void refreshReview();
