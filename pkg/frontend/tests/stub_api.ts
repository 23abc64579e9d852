// In-memory fetch stub implementing the crisismap API contract: layer and
// time filtering, read-time rank scoring with live weights, validation
// upserts, and machine-readable errors. Tests drive the real client code
// against this fixture; no network is involved.

import type { Feature, FeatureCollection, Method, RankingParams } from "../src/types.js";

export const BASE_TIME = 1_391_600_000;

interface StubPost {
  post_id: number;
  method: Method;
  point: [number, number] | null; // [lat, lon]
  precision_class: "poi" | "street" | "locality" | "region" | null;
  confidence: number;
  created_at: number;
  text: string;
  validated: boolean;
  media: Feature["properties"]["media"];
}

export function defaultPosts(): StubPost[] {
  return [
    {
      post_id: 1, method: "native", point: [50.6, -3.5], precision_class: "poi",
      confidence: 1.0, created_at: BASE_TIME + 60, text: "sea wall breached", validated: false,
      media: [],
    },
    {
      post_id: 2, method: "cime_local", point: [50.62, -3.48], precision_class: "locality",
      confidence: 0.7, created_at: BASE_TIME + 120, text: "water in the high street", validated: false,
      media: [{ url: "https://pic.example/2.jpg", kind: "image", origin: "embedded", image_tags: ["flood"] }],
    },
    {
      post_id: 3, method: "cime_global", point: [50.58, -3.46], precision_class: "street",
      confidence: 0.5, created_at: BASE_TIME + 180, text: "rail line under water", validated: false,
      media: [{ url: "https://vid.example/3.mp4", kind: "video", origin: "linked_platform", image_tags: [] }],
    },
    {
      post_id: 4, method: "unresolved", point: null, precision_class: null,
      confidence: 0.0, created_at: BASE_TIME + 240, text: "so much rain", validated: false,
      media: [],
    },
    {
      post_id: 5, method: "cime_local", point: [10.0, 10.0], precision_class: "region",
      confidence: 0.9, created_at: BASE_TIME + 300, text: "far away chatter", validated: false,
      media: [],
    },
    {
      post_id: 6, method: "native", point: [50.59, -3.47], precision_class: "poi",
      confidence: 1.0, created_at: BASE_TIME - 50_000, text: "older geotagged post", validated: false,
      media: [],
    },
  ];
}

const PRECISION_TERM: Record<string, number> = { poi: 1.0, street: 0.8, locality: 0.5, region: 0.2 };

export class StubApi {
  posts: StubPost[];
  ranking: RankingParams = {
    w_precision: 0.4, w_confidence: 0.3, w_recency: 0.2, w_validated: 0.1,
    recency_halflife_s: 21_600,
  };
  calls = { posts: 0, detail: 0, validate: 0, rankingPut: 0, stats: 0 };
  validateBodies: Array<{ id: number; validated: boolean }> = [];
  lastPostsUrl: URL | null = null;
  failNextPosts = false;
  postsDelayMs: number[] = []; // consumed per posts request, FIFO

  constructor(posts: StubPost[] = defaultPosts()) {
    this.posts = posts;
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = new URL(String(input));
    const method = init?.method ?? "GET";
    const path = url.pathname;

    if (path === "/api/posts" && method === "GET") {
      this.calls.posts += 1;
      this.lastPostsUrl = url;
      const delay = this.postsDelayMs.shift();
      if (delay !== undefined) await sleep(delay);
      if (init?.signal?.aborted) throw new DOMException("aborted", "AbortError");
      if (this.failNextPosts) {
        this.failNextPosts = false;
        return json({ error: "internal", message: "stub failure" }, 500);
      }
      return json(this.collection(url));
    }
    const detailMatch = path.match(/^\/api\/posts\/(\d+)$/);
    if (detailMatch && method === "GET") {
      this.calls.detail += 1;
      const post = this.byId(Number(detailMatch[1]));
      if (!post) return json({ error: "not_found", message: "no such post" }, 404);
      return json(this.feature(post, true));
    }
    const validateMatch = path.match(/^\/api\/posts\/(\d+)\/validate$/);
    if (validateMatch && method === "POST") {
      this.calls.validate += 1;
      const post = this.byId(Number(validateMatch[1]));
      if (!post) return json({ error: "not_found", message: "no such post" }, 404);
      const body = JSON.parse(String(init?.body));
      post.validated = Boolean(body.validated);
      this.validateBodies.push({ id: post.post_id, validated: post.validated });
      return json(this.feature(post));
    }
    if (path === "/api/ranking" && method === "GET") {
      return json(this.ranking);
    }
    if (path === "/api/ranking" && method === "PUT") {
      this.calls.rankingPut += 1;
      const body = JSON.parse(String(init?.body)) as RankingParams;
      const weights = [body.w_precision, body.w_confidence, body.w_recency, body.w_validated];
      if (weights.some((w) => w < 0) || weights.every((w) => w === 0)) {
        return json({ error: "bad_params", message: "weights must be non-negative, not all zero" }, 400);
      }
      this.ranking = body;
      return json(this.ranking);
    }
    if (path === "/api/stats" && method === "GET") {
      this.calls.stats += 1;
      const times = this.posts.map((p) => p.created_at);
      return json({
        total: this.posts.length,
        by_method: {}, by_precision: {}, by_source: {}, validated: {},
        time_extent: { from: Math.min(...times), to: Math.max(...times) },
      });
    }
    return json({ error: "not_found", message: `no route ${method} ${path}` }, 404);
  };

  private byId(id: number): StubPost | undefined {
    return this.posts.find((p) => p.post_id === id);
  }

  private now(): number {
    return Math.max(...this.posts.map((p) => p.created_at));
  }

  score(post: StubPost): number {
    const r = this.ranking;
    const precision =
      post.method === "native" ? 1.0
      : post.method === "unresolved" ? 0.0
      : PRECISION_TERM[post.precision_class ?? "region"] ?? 0.0;
    const recency = 0.5 ** ((this.now() - post.created_at) / r.recency_halflife_s);
    return (
      r.w_precision * precision +
      r.w_confidence * post.confidence +
      r.w_recency * recency +
      r.w_validated * (post.validated ? 1 : 0)
    );
  }

  private feature(post: StubPost, withEvidence = false): Feature {
    const properties: Feature["properties"] = {
      post_id: post.post_id,
      source: "twitter",
      created_at: post.created_at,
      text: post.text,
      method: post.method,
      precision_class: post.precision_class,
      radius_m: post.precision_class ? 5000 : null,
      confidence: post.confidence,
      crowd_validated: post.validated,
      rank_score: this.score(post),
      media: post.media,
      image_tags: post.media.flatMap((m) => m.image_tags),
      original_post_url: `https://twitter.com/u${post.post_id}/status/${post.post_id}`,
    };
    if (post.point) {
      properties.streetview_url = `https://www.google.com/maps?layer=c&cbll=${post.point[0]},${post.point[1]}`;
    }
    if (withEvidence) properties.evidence = [`stub scoring trace for ${post.post_id}`];
    return {
      type: "Feature",
      geometry: post.point ? { type: "Point", coordinates: [post.point[1], post.point[0]] } : null,
      properties,
    };
  }

  private collection(url: URL): FeatureCollection {
    const layer = url.searchParams.get("layer") ?? "all";
    const from = url.searchParams.get("from");
    const to = url.searchParams.get("to");
    const bbox = url.searchParams.get("bbox")?.split(",").map(Number);
    let selected = this.posts.filter((p) => {
      if (layer === "native" && p.method !== "native") return false;
      if (layer === "cime" && p.method !== "cime_local" && p.method !== "cime_global") return false;
      if (from && p.created_at < Date.parse(from) / 1000) return false;
      if (to && p.created_at > Date.parse(to) / 1000) return false;
      if (bbox) {
        if (!p.point) return false;
        const [minLon, minLat, maxLon, maxLat] = bbox as [number, number, number, number];
        const [lat, lon] = p.point;
        if (lon < minLon || lon > maxLon || lat < minLat || lat > maxLat) return false;
      }
      return true;
    });
    selected = selected.slice().sort((a, b) => {
      const diff = this.score(b) - this.score(a);
      return diff !== 0 ? diff : a.post_id - b.post_id;
    });
    const limit = url.searchParams.get("limit");
    if (limit) selected = selected.slice(0, Number(limit));
    return { type: "FeatureCollection", features: selected.map((p) => this.feature(p)) };
  }
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
