// Wire types mirroring the query service exactly; the client never
// invents fields the service does not send.

export interface GroupByEntry {
  hierarchy: string;
  depth: number;
}

export interface FilterEntry {
  dim: string;
  members: string[];
}

export interface QueryRequest {
  group_by: GroupByEntry[];
  filters: FilterEntry[];
  measures: string[];
}

export interface MeasureValue {
  sum: number;
  known: number;
  unknown: number;
}

export interface ResponseCell {
  path: string[];
  values: Record<string, MeasureValue>;
}

export interface QueryResponse {
  query: QueryRequest;
  cells: ResponseCell[];
  total: number;
}

export interface SchemaLevel {
  name: string;
  members: number;
}

export interface SchemaHierarchy {
  name: string;
  levels: SchemaLevel[];
}

export interface SchemaResponse {
  format_version: number;
  codebook_version: string;
  hierarchies: SchemaHierarchy[];
  measures: string[];
  total_facts: number;
}

export interface AssociationRulePayload {
  antecedent: string[];
  consequent: string[];
  support: number;
  confidence: number;
  lift: number;
  support_count: number;
}

export interface RulesResponse {
  rules: AssociationRulePayload[];
  transaction_count: number;
}

export interface OutlierPayload {
  coords: string[];
  measure: string;
  value: number;
  score: number;
  flagged: boolean;
  method: string;
}

export interface OutliersResponse {
  outliers: OutlierPayload[];
}

export interface ErrorResponse {
  error: string;
}

export function levelsOf(schema: SchemaResponse, hierarchy: string): SchemaLevel[] {
  const found = schema.hierarchies.find((h) => h.name === hierarchy);
  if (!found) throw new Error(`unknown hierarchy ${hierarchy}`);
  return found.levels;
}

/** Column name for one level of a hierarchy, matching the service's
 * filter dim syntax: flat dims are bare, hierarchy levels are dotted. */
export function levelDim(schema: SchemaResponse, hierarchy: string, depth: number): string {
  const levels = levelsOf(schema, hierarchy);
  if (depth < 1 || depth > levels.length) {
    throw new Error(`depth ${depth} out of range for ${hierarchy}`);
  }
  return levels.length === 1 ? hierarchy : `${hierarchy}.${levels[depth - 1].name}`;
}
