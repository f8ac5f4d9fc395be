import { describe, expect, it } from "vitest";

import {
  axisColumns,
  buildGrid,
  errorBanner,
  renderHtml,
  renderedNumbers,
  unknownBadge,
} from "../src/grid.js";
import { QueryResponse, SchemaResponse } from "../src/types.js";

const schema: SchemaResponse = {
  format_version: 1,
  codebook_version: "1",
  total_facts: 7,
  hierarchies: [
    {
      name: "space",
      levels: [
        { name: "region", members: 2 },
        { name: "country", members: 2 },
        { name: "provstate", members: 2 },
        { name: "city", members: 2 },
      ],
    },
    { name: "attack", levels: [{ name: "attack", members: 3 }] },
  ],
  measures: ["incident_count", "nkill"],
};

const grandTotal: QueryResponse = {
  query: { group_by: [], filters: [], measures: ["incident_count"] },
  cells: [{ path: [], values: { incident_count: { sum: 7, known: 7, unknown: 0 } } }],
  total: 7,
};

const byRegion: QueryResponse = {
  query: {
    group_by: [{ hierarchy: "space", depth: 2 }, { hierarchy: "attack", depth: 1 }],
    filters: [],
    measures: ["incident_count", "nkill"],
  },
  cells: [
    {
      path: ["South Asia", "India", "Bombing/Explosion"],
      values: {
        incident_count: { sum: 4, known: 4, unknown: 0 },
        nkill: { sum: 11, known: 2, unknown: 2 },
      },
    },
    {
      path: ["South Asia", "Nepal", "Assassination"],
      values: {
        incident_count: { sum: 3, known: 3, unknown: 0 },
        nkill: { sum: 5, known: 3, unknown: 0 },
      },
    },
  ],
  total: 7,
};

describe("buildGrid", () => {
  it("renders a grand-total response as a single row", () => {
    const grid = buildGrid(grandTotal, schema);
    expect(grid.rows).toHaveLength(1);
    expect(grid.rows[0].path).toEqual([]);
    expect(grid.total).toBe(7);
  });

  it("derives axis columns from the echoed query", () => {
    const grid = buildGrid(byRegion, schema);
    expect(grid.axisColumns).toEqual(["space.region", "space.country", "attack"]);
    expect(axisColumns(grandTotal.query, schema)).toEqual([]);
  });

  it("copies every number verbatim from the response", () => {
    const grid = buildGrid(byRegion, schema);
    const payloadNumbers = new Set<number>();
    for (const cell of byRegion.cells) {
      for (const value of Object.values(cell.values)) {
        payloadNumbers.add(value.sum);
        payloadNumbers.add(value.unknown);
      }
    }
    payloadNumbers.add(byRegion.total);
    for (const n of renderedNumbers(grid)) {
      expect(payloadNumbers.has(n)).toBe(true);
    }
  });
});

describe("rendering", () => {
  it("shows an unknown badge when unknown_count is positive", () => {
    const grid = buildGrid(byRegion, schema);
    expect(unknownBadge(grid.rows[0].values[1])).toBe("2 unknown");
    expect(unknownBadge(grid.rows[0].values[0])).toBe("");
    const html = renderHtml(grid);
    expect(html).toContain('<span class="badge">2 unknown</span>');
  });

  it("renders a totals row matching the response total", () => {
    const html = renderHtml(buildGrid(byRegion, schema));
    expect(html).toContain('class="totals"');
    expect(html).toContain(">7</td>");
  });

  it("escapes member labels", () => {
    const nasty: QueryResponse = {
      query: { group_by: [{ hierarchy: "attack", depth: 1 }], filters: [], measures: ["incident_count"] },
      cells: [
        {
          path: ['<script>"x"</script>'],
          values: { incident_count: { sum: 1, known: 1, unknown: 0 } },
        },
      ],
      total: 1,
    };
    const html = renderHtml(buildGrid(nasty, schema));
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("error banner echoes status, message, and the request", () => {
    const banner = errorBanner(422, "unknown measure 'foo'", { measures: ["foo"] });
    expect(banner).toContain("422");
    expect(banner).toContain("unknown measure");
    expect(banner).toContain("&quot;measures&quot;");
  });
});
