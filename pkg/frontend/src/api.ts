// Thin typed client over the query service.  The fetch function is
// injectable so tests can serve captured payloads.

import {
  ErrorResponse,
  OutliersResponse,
  QueryRequest,
  QueryResponse,
  RulesResponse,
  SchemaResponse,
} from "./types.js";

export interface FetchLike {
  (url: string, init?: { method?: string; body?: string; headers?: Record<string, string> }):
    Promise<{ ok: boolean; status: number; text(): Promise<string> }>;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly request: unknown,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    const text = await response.text();
    if (!response.ok) {
      throw new ServiceError(response.status, errorMessage(text), null);
    }
    return JSON.parse(text) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      body: JSON.stringify(body),
      headers: { "content-type": "application/json" },
    });
    const text = await response.text();
    if (!response.ok) {
      throw new ServiceError(response.status, errorMessage(text), body);
    }
    return JSON.parse(text) as T;
  }

  schema(): Promise<SchemaResponse> {
    return this.get<SchemaResponse>("/schema");
  }

  query(request: QueryRequest): Promise<QueryResponse> {
    return this.post<QueryResponse>("/query", request);
  }

  mineRules(body: {
    transactions: string[][];
    min_support: number;
    min_confidence: number;
  }): Promise<RulesResponse> {
    return this.post<RulesResponse>("/mine/rules", body);
  }

  mineOutliers(body: {
    query: QueryRequest;
    measure: string;
    threshold: number;
  }): Promise<OutliersResponse> {
    return this.post<OutliersResponse>("/mine/outliers", body);
  }
}

function errorMessage(text: string): string {
  try {
    const parsed = JSON.parse(text) as ErrorResponse;
    if (parsed && typeof parsed.error === "string") return parsed.error;
  } catch {
    // fall through to the raw body
  }
  return text || "request failed";
}
