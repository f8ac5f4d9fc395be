// Browser wiring: pickers from /schema, click-to-drill, breadcrumb,
// back button, and URL-hash state so analyses are shareable links.

import { ApiClient, ServiceError } from "./api.js";
import { errorBanner, renderHtml } from "./grid.js";
import {
  ExplorerState,
  applyResponse,
  back,
  decodeStateFromHash,
  drill,
  encodeStateToHash,
  initialState,
  replayRequest,
} from "./state.js";
import { QueryRequest, SchemaResponse } from "./types.js";

// same-origin by default; `?api=http://host:port` points the explorer at a
// service running elsewhere (the API allows cross-origin reads)
const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const api = new ApiClient(apiBase, (url, init) => fetch(url, init));

let schema: SchemaResponse;
let state: ExplorerState;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function defaultRequest(): QueryRequest {
  return {
    group_by: [{ hierarchy: "space", depth: 1 }],
    filters: [],
    measures: ["incident_count", "nkill"],
  };
}

async function issue(request: QueryRequest, seq: number): Promise<void> {
  try {
    const response = await api.query(request);
    state = applyResponse(state, seq, response, schema);
  } catch (error) {
    if (error instanceof ServiceError) {
      el("grid").innerHTML = errorBanner(error.status, error.message, error.request);
      state = { ...state, pending: false };
      return;
    }
    throw error;
  }
  render();
}

function render(): void {
  el("breadcrumb").textContent = state.breadcrumb.length
    ? state.breadcrumb.map((s) => `${s.level}: ${s.member}`).join("  >  ")
    : "(top level)";
  el("hint").textContent = state.hint ?? "";
  if (state.grid) {
    el("grid").innerHTML = renderHtml(state.grid);
    for (const row of el("grid").querySelectorAll<HTMLTableRowElement>("tr[data-path]")) {
      row.addEventListener("click", () => {
        const path = JSON.parse(row.dataset.path ?? "[]") as string[];
        onDrill(path);
      });
    }
  }
  window.location.hash = encodeStateToHash(state.base, state.breadcrumb);
}

function onDrill(path: string[]): void {
  if (state.pending) return; // single in-flight query per view
  const outcome = drill(state, schema, path);
  state = outcome.state;
  if (outcome.issued) {
    void issue(outcome.issued, state.seq);
  }
  render();
}

function buildPickers(): void {
  const measurePicker = el<HTMLSelectElement>("measures");
  for (const measure of schema.measures) {
    const option = document.createElement("option");
    option.value = measure;
    option.textContent = measure;
    option.selected = state.base.measures.includes(measure);
    measurePicker.appendChild(option);
  }
  const axisPicker = el<HTMLSelectElement>("axis");
  for (const hierarchy of schema.hierarchies) {
    const option = document.createElement("option");
    option.value = hierarchy.name;
    option.textContent = hierarchy.name;
    option.selected = state.base.group_by.some((g) => g.hierarchy === hierarchy.name);
    axisPicker.appendChild(option);
  }
  el("apply").addEventListener("click", () => {
    const measures = Array.from(measurePicker.selectedOptions).map((o) => o.value);
    const axes = Array.from(axisPicker.selectedOptions).map((o) => o.value);
    const base: QueryRequest = {
      group_by: axes.map((hierarchy) => ({ hierarchy, depth: 1 })),
      filters: [],
      measures: measures.length ? measures : ["incident_count"],
    };
    state = { ...initialState(base), seq: state.seq + 1, pending: true };
    void issue(state.request, state.seq);
  });
  el("back").addEventListener("click", () => {
    state = back(state);
    render();
  });
}

async function start(): Promise<void> {
  schema = await api.schema();
  const fromHash = decodeStateFromHash(window.location.hash);
  if (fromHash) {
    state = initialState(fromHash.base);
    const request = replayRequest(fromHash.base, fromHash.breadcrumb, schema);
    state = {
      ...state,
      request,
      breadcrumb: fromHash.breadcrumb,
      pending: true,
      seq: 1,
      // back-navigation after a hash restore refetches instead of caching
      cache: fromHash.breadcrumb.map(() => ({ request, grid: null, response: null })),
    };
  } else {
    state = { ...initialState(defaultRequest()), pending: true, seq: 1 };
  }
  buildPickers();
  await issue(state.request, state.seq);
}

void start();
