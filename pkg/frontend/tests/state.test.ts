import { describe, expect, it } from "vitest";

import {
  applyResponse,
  back,
  decodeStateFromHash,
  drill,
  drillableEntry,
  encodeStateToHash,
  initialState,
  replayRequest,
} from "../src/state.js";
import { QueryRequest, QueryResponse, SchemaResponse } from "../src/types.js";

const schema: SchemaResponse = {
  format_version: 1,
  codebook_version: "1",
  total_facts: 10,
  hierarchies: [
    {
      name: "space",
      levels: [
        { name: "region", members: 2 },
        { name: "country", members: 3 },
        { name: "provstate", members: 3 },
        { name: "city", members: 3 },
      ],
    },
    {
      name: "time",
      levels: [
        { name: "year", members: 2 },
        { name: "month", members: 2 },
        { name: "day", members: 2 },
      ],
    },
    { name: "attack", levels: [{ name: "attack", members: 3 }] },
  ],
  measures: ["incident_count"],
};

function base(): QueryRequest {
  return {
    group_by: [{ hierarchy: "space", depth: 1 }],
    filters: [],
    measures: ["incident_count"],
  };
}

function response(request: QueryRequest, paths: string[][], counts: number[]): QueryResponse {
  return {
    query: request,
    cells: paths.map((path, i) => ({
      path,
      values: { incident_count: { sum: counts[i], known: counts[i], unknown: 0 } },
    })),
    total: counts.reduce((a, b) => a + b, 0),
  };
}

describe("drill", () => {
  it("appends a slice filter and deepens the axis", () => {
    const state = initialState(base());
    const { state: next, issued } = drill(state, schema, ["South Asia"]);
    expect(issued).not.toBeNull();
    expect(issued!.group_by).toEqual([{ hierarchy: "space", depth: 2 }]);
    expect(issued!.filters).toEqual([{ dim: "space.region", members: ["South Asia"] }]);
    expect(next.breadcrumb).toEqual([
      { hierarchy: "space", level: "region", member: "South Asia" },
    ]);
    expect(next.pending).toBe(true);
    expect(next.seq).toBe(state.seq + 1);
  });

  it("moves to the next axis once the first is at its leaf", () => {
    let state = initialState({
      group_by: [
        { hierarchy: "space", depth: 4 },
        { hierarchy: "time", depth: 1 },
      ],
      filters: [],
      measures: ["incident_count"],
    });
    const target = drillableEntry(state.request, schema);
    expect(target).toEqual({ index: 1, hierarchy: "time", depth: 1 });
    const { issued } = drill(state, schema, ["R", "C", "P", "Y", "1993"]);
    expect(issued!.filters).toEqual([{ dim: "time.year", members: ["1993"] }]);
    expect(issued!.group_by[1]).toEqual({ hierarchy: "time", depth: 2 });
  });

  it("is a no-op with a hint at the deepest level everywhere", () => {
    const state = initialState({
      group_by: [{ hierarchy: "attack", depth: 1 }],
      filters: [],
      measures: ["incident_count"],
    });
    const { state: next, issued } = drill(state, schema, ["Bombing/Explosion"]);
    expect(issued).toBeNull();
    expect(next.hint).toMatch(/deepest/);
    expect(next.request).toEqual(state.request);
    expect(next.breadcrumb).toEqual([]);
  });
});

describe("responses", () => {
  it("applies the matching sequence number", () => {
    let state = initialState(base());
    const { state: drilled, issued } = drill(state, schema, ["South Asia"]);
    const applied = applyResponse(
      drilled,
      drilled.seq,
      response(issued!, [["South Asia", "India"]], [3]),
      schema,
    );
    expect(applied.pending).toBe(false);
    expect(applied.grid!.rows[0].path).toEqual(["South Asia", "India"]);
  });

  it("drops stale responses by sequence number", () => {
    let state = initialState(base());
    state = drill(state, schema, ["A"]).state; // seq 1
    const newer = drill(state, schema, ["A", "B"]); // seq 2
    const stale = applyResponse(
      newer.state,
      1,
      response(base(), [["OLD"]], [1]),
      schema,
    );
    expect(stale).toBe(newer.state); // unchanged: superseded request
    expect(stale.grid).toBeNull();
  });
});

describe("back navigation", () => {
  it("restores the previous grid from cache without a refetch", () => {
    let state = initialState(base());
    state = applyResponse(state, 0, response(base(), [["South Asia"]], [5]), schema);
    const topGrid = state.grid;

    const drilled = drill(state, schema, ["South Asia"]);
    state = applyResponse(
      drilled.state,
      drilled.state.seq,
      response(drilled.issued!, [["South Asia", "India"]], [5]),
      schema,
    );
    expect(state.grid!.rows[0].path).toEqual(["South Asia", "India"]);

    state = back(state);
    expect(state.grid).toBe(topGrid); // the very same cached object
    expect(state.breadcrumb).toEqual([]);
    expect(state.request).toEqual(base());
  });

  it("hints when there is nothing to pop", () => {
    const state = back(initialState(base()));
    expect(state.hint).toMatch(/nothing/);
  });
});

describe("breadcrumb replay", () => {
  it("reproduces the current request exactly after drills and backs", () => {
    let state = initialState({
      group_by: [
        { hierarchy: "space", depth: 1 },
        { hierarchy: "time", depth: 1 },
      ],
      filters: [{ dim: "crit1", members: ["Yes"] }],
      measures: ["incident_count"],
    });
    state = drill(state, schema, ["R1", "1993"]).state;
    state = drill(state, schema, ["R1", "C1", "1993"]).state;
    state = drill(state, schema, ["R1", "C1", "P1", "1993"]).state;
    state = back(state);
    state = drill(state, schema, ["R1", "C1", "P2", "1994"]).state;
    expect(replayRequest(state.base, state.breadcrumb, schema)).toEqual(state.request);
  });
});

describe("url state", () => {
  it("round-trips base request and breadcrumb through the hash", () => {
    const breadcrumb = [{ hierarchy: "space", level: "region", member: "South Asia" }];
    const hash = encodeStateToHash(base(), breadcrumb);
    const decoded = decodeStateFromHash(`#${hash}`);
    expect(decoded).toEqual({ base: base(), breadcrumb });
  });

  it("rejects garbage hashes", () => {
    expect(decodeStateFromHash("#not-json")).toBeNull();
    expect(decodeStateFromHash("")).toBeNull();
  });
});
