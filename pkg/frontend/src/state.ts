// Explorer state machine.  Everything here is pure: drilling, backing
// out, and applying responses return new states, so the whole
// navigation history is replayable and unit-testable without a DOM.

import { GridView, buildGrid } from "./grid.js";
import {
  QueryRequest,
  QueryResponse,
  SchemaResponse,
  levelDim,
  levelsOf,
} from "./types.js";

export interface DrillStep {
  hierarchy: string;
  level: string; // level name the member was clicked at
  member: string;
}

interface CacheEntry {
  request: QueryRequest;
  grid: GridView | null;
  response: QueryResponse | null;
}

export interface ExplorerState {
  base: QueryRequest; // breadcrumb replays against this
  request: QueryRequest;
  breadcrumb: DrillStep[];
  grid: GridView | null;
  response: QueryResponse | null;
  pending: boolean;
  seq: number; // sequence number of the newest issued request
  cache: CacheEntry[]; // one entry per breadcrumb depth, for free back-nav
  hint: string | null;
}

function cloneRequest(request: QueryRequest): QueryRequest {
  return {
    group_by: request.group_by.map((g) => ({ ...g })),
    filters: request.filters.map((f) => ({ dim: f.dim, members: [...f.members] })),
    measures: [...request.measures],
  };
}

export function initialState(base: QueryRequest): ExplorerState {
  return {
    base: cloneRequest(base),
    request: cloneRequest(base),
    breadcrumb: [],
    grid: null,
    response: null,
    pending: false,
    seq: 0,
    cache: [],
    hint: null,
  };
}

/** First group-by entry that still has a deeper level to drill into. */
export function drillableEntry(
  request: QueryRequest,
  schema: SchemaResponse,
): { index: number; hierarchy: string; depth: number } | null {
  for (let i = 0; i < request.group_by.length; i++) {
    const entry = request.group_by[i];
    if (entry.depth < levelsOf(schema, entry.hierarchy).length) {
      return { index: i, hierarchy: entry.hierarchy, depth: entry.depth };
    }
  }
  return null;
}

/** Position of a hierarchy's deepest member in a cell path. */
function pathPosition(request: QueryRequest, entryIndex: number): number {
  let offset = 0;
  for (let i = 0; i < entryIndex; i++) offset += request.group_by[i].depth;
  return offset + request.group_by[entryIndex].depth - 1;
}

export interface DrillOutcome {
  state: ExplorerState;
  issued: QueryRequest | null; // request to send, null on a no-op hint
}

/** Click on a grid cell: slice on its member and go one level deeper.
 * Leaf-level clicks are a no-op carrying a hint. */
export function drill(
  state: ExplorerState,
  schema: SchemaResponse,
  cellPath: string[],
): DrillOutcome {
  const target = drillableEntry(state.request, schema);
  if (target === null) {
    return {
      state: { ...state, hint: "already at the deepest level on every axis" },
      issued: null,
    };
  }
  const member = cellPath[pathPosition(state.request, target.index)];
  if (member === undefined) {
    return { state: { ...state, hint: "cell path does not cover the drill axis" }, issued: null };
  }
  const dim = levelDim(schema, target.hierarchy, target.depth);
  const levelName = levelsOf(schema, target.hierarchy)[target.depth - 1].name;

  const request = cloneRequest(state.request);
  request.group_by[target.index] = {
    hierarchy: target.hierarchy,
    depth: target.depth + 1,
  };
  request.filters = [...request.filters, { dim, members: [member] }];

  const next: ExplorerState = {
    ...state,
    request,
    breadcrumb: [
      ...state.breadcrumb,
      { hierarchy: target.hierarchy, level: levelName, member },
    ],
    cache: [
      ...state.cache,
      { request: state.request, grid: state.grid, response: state.response },
    ],
    pending: true,
    seq: state.seq + 1,
    hint: null,
  };
  return { state: next, issued: request };
}

/** Apply a /query response; stale sequence numbers are dropped. */
export function applyResponse(
  state: ExplorerState,
  seq: number,
  response: QueryResponse,
  schema: SchemaResponse,
): ExplorerState {
  if (seq !== state.seq) return state; // superseded request
  return {
    ...state,
    grid: buildGrid(response, schema),
    response,
    pending: false,
    hint: null,
  };
}

/** Pop one drill step, restoring the cached grid without a refetch. */
export function back(state: ExplorerState): ExplorerState {
  if (state.breadcrumb.length === 0) {
    return { ...state, hint: "nothing to go back to" };
  }
  const cache = [...state.cache];
  const restored = cache.pop()!;
  return {
    ...state,
    request: restored.request,
    grid: restored.grid,
    response: restored.response,
    breadcrumb: state.breadcrumb.slice(0, -1),
    cache,
    pending: false,
    hint: null,
  };
}

/** Recompute the request a breadcrumb stands for.  Invariant: equals
 * the state's current request after any run of drills and backs. */
export function replayRequest(
  base: QueryRequest,
  breadcrumb: DrillStep[],
  schema: SchemaResponse,
): QueryRequest {
  const request = cloneRequest(base);
  for (const step of breadcrumb) {
    const index = request.group_by.findIndex(
      (g) =>
        g.hierarchy === step.hierarchy &&
        levelsOf(schema, g.hierarchy)[g.depth - 1].name === step.level,
    );
    if (index < 0) throw new Error(`breadcrumb step ${step.member} does not replay`);
    const dim = levelDim(schema, step.hierarchy, request.group_by[index].depth);
    request.filters = [...request.filters, { dim, members: [step.member] }];
    request.group_by[index] = {
      hierarchy: step.hierarchy,
      depth: request.group_by[index].depth + 1,
    };
  }
  return request;
}

// --- URL-encoded state, so explorations are shareable links -----------------

export function encodeStateToHash(base: QueryRequest, breadcrumb: DrillStep[]): string {
  return encodeURIComponent(JSON.stringify({ base, breadcrumb }));
}

export function decodeStateFromHash(
  hash: string,
): { base: QueryRequest; breadcrumb: DrillStep[] } | null {
  if (!hash) return null;
  try {
    const raw = JSON.parse(decodeURIComponent(hash.replace(/^#/, "")));
    if (!raw || typeof raw !== "object" || !raw.base) return null;
    return { base: raw.base as QueryRequest, breadcrumb: (raw.breadcrumb ?? []) as DrillStep[] };
  } catch {
    return null;
  }
}
