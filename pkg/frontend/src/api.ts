import type { BBox, Feature, FeatureCollection, Layer, RankingParams, Stats } from "./types.js";

export interface PostsQuery {
  layer: Layer;
  bbox?: BBox;
  from?: number; // epoch seconds
  to?: number;
  minPrecision?: string;
  mediaOnly?: boolean;
  limit?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function toIso(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString();
}

async function errorFrom(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      code = body.error;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message);
}

/** Typed client for the crisismap API. Post queries are latest-wins: a new
 * fetchPosts aborts the previous in-flight one. */
export class ApiClient {
  private postsAbort: AbortController | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await errorFrom(response);
    return response;
  }

  async fetchPosts(query: PostsQuery): Promise<FeatureCollection> {
    const params = new URLSearchParams();
    params.set("layer", query.layer);
    if (query.bbox) params.set("bbox", query.bbox.join(","));
    if (query.from !== undefined) params.set("from", toIso(query.from));
    if (query.to !== undefined) params.set("to", toIso(query.to));
    if (query.minPrecision) params.set("min_precision", query.minPrecision);
    if (query.mediaOnly) params.set("media_only", "true");
    if (query.limit !== undefined) params.set("limit", String(query.limit));
    this.postsAbort?.abort();
    const abort = new AbortController();
    this.postsAbort = abort;
    try {
      const response = await this.request(`/api/posts?${params}`, { signal: abort.signal });
      return (await response.json()) as FeatureCollection;
    } finally {
      if (this.postsAbort === abort) this.postsAbort = null;
    }
  }

  async fetchDetail(postId: number): Promise<Feature> {
    const response = await this.request(`/api/posts/${postId}`);
    return (await response.json()) as Feature;
  }

  async validate(postId: number, validated: boolean): Promise<Feature> {
    const response = await this.request(`/api/posts/${postId}/validate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ validated }),
    });
    return (await response.json()) as Feature;
  }

  async getRanking(): Promise<RankingParams> {
    return (await (await this.request("/api/ranking")).json()) as RankingParams;
  }

  async putRanking(params: RankingParams): Promise<RankingParams> {
    const response = await this.request("/api/ranking", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(params),
    });
    return (await response.json()) as RankingParams;
  }

  async getStats(): Promise<Stats> {
    return (await (await this.request("/api/stats")).json()) as Stats;
  }
}

export function isAbortError(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
