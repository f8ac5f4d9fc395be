// Grid building and rendering.  The UI never recomputes aggregates:
// every number in a GridView is copied verbatim from a service
// response, including the totals row.

import {
  QueryRequest,
  QueryResponse,
  SchemaResponse,
  levelsOf,
} from "./types.js";

export interface GridCellValue {
  measure: string;
  value: number;
  known: number;
  unknown: number;
}

export interface GridRow {
  path: string[];
  values: GridCellValue[];
}

export interface GridView {
  axisColumns: string[];
  measures: string[];
  rows: GridRow[];
  total: number;
}

export function axisColumns(request: QueryRequest, schema: SchemaResponse): string[] {
  const columns: string[] = [];
  for (const entry of request.group_by) {
    const levels = levelsOf(schema, entry.hierarchy);
    for (let depth = 1; depth <= entry.depth; depth++) {
      columns.push(
        levels.length === 1 ? entry.hierarchy : `${entry.hierarchy}.${levels[depth - 1].name}`,
      );
    }
  }
  return columns;
}

export function buildGrid(response: QueryResponse, schema: SchemaResponse): GridView {
  const measures = response.query.measures;
  const rows: GridRow[] = response.cells.map((cell) => ({
    path: [...cell.path],
    values: measures.map((m) => ({
      measure: m,
      value: cell.values[m].sum,
      known: cell.values[m].known,
      unknown: cell.values[m].unknown,
    })),
  }));
  return {
    axisColumns: axisColumns(response.query, schema),
    measures: [...measures],
    rows,
    total: response.total,
  };
}

export function unknownBadge(value: GridCellValue): string {
  return value.unknown > 0 ? `${value.unknown} unknown` : "";
}

/** Every number a rendered grid shows, for provenance checks. */
export function renderedNumbers(grid: GridView): number[] {
  const numbers: number[] = [grid.total];
  for (const row of grid.rows) {
    for (const value of row.values) {
      numbers.push(value.value);
      if (value.unknown > 0) numbers.push(value.unknown);
    }
  }
  return numbers;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderHtml(grid: GridView): string {
  const head = [...grid.axisColumns, ...grid.measures]
    .map((c) => `<th>${escapeHtml(c)}</th>`)
    .join("");
  const body = grid.rows
    .map((row) => {
      const axis = row.path
        .map((m) => `<td class="member" data-member="${escapeHtml(m)}">${escapeHtml(m)}</td>`)
        .join("");
      const cells = row.values
        .map((v) => {
          const badge = unknownBadge(v);
          const badgeHtml = badge ? ` <span class="badge">${escapeHtml(badge)}</span>` : "";
          return `<td class="value">${v.value}${badgeHtml}</td>`;
        })
        .join("");
      return `<tr data-path="${escapeHtml(JSON.stringify(row.path))}">${axis}${cells}</tr>`;
    })
    .join("\n");
  const width = grid.axisColumns.length + grid.measures.length;
  const totals =
    `<tr class="totals"><td colspan="${Math.max(1, width - 1)}">total facts</td>` +
    `<td class="value">${grid.total}</td></tr>`;
  return `<table class="grid"><thead><tr>${head}</tr></thead><tbody>\n${body}\n${totals}</tbody></table>`;
}

export function errorBanner(status: number, message: string, request: unknown): string {
  const echo = escapeHtml(JSON.stringify(request));
  return (
    `<div class="error-banner">service error ${status}: ${escapeHtml(message)}` +
    `<pre class="request-echo">${echo}</pre></div>`
  );
}
