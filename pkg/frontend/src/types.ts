// Payload shapes of the crisismap HTTP API. The client renders these
// verbatim; it never derives scores or locations itself.

export type Method = "native" | "cime_local" | "cime_global" | "unresolved";
export type Layer = "native" | "cime" | "all";
export type PrecisionClass = "poi" | "street" | "locality" | "region";

export interface MediaOut {
  url: string;
  kind: "image" | "video";
  origin: "embedded" | "linked_platform";
  image_tags: string[];
}

export interface FeatureProperties {
  post_id: number;
  source: string;
  created_at: number; // epoch seconds UTC
  text: string;
  method: Method;
  precision_class: PrecisionClass | null;
  radius_m: number | null;
  confidence: number;
  crowd_validated: boolean;
  rank_score: number;
  media: MediaOut[];
  image_tags: string[];
  original_post_url: string;
  streetview_url?: string;
  evidence?: string[];
}

export interface PointGeometry {
  type: "Point";
  coordinates: [number, number]; // [lon, lat]
}

export interface Feature {
  type: "Feature";
  geometry: PointGeometry | null;
  properties: FeatureProperties;
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: Feature[];
}

export interface RankingParams {
  w_precision: number;
  w_confidence: number;
  w_recency: number;
  w_validated: number;
  recency_halflife_s: number;
}

export interface Stats {
  total: number;
  by_method: Record<string, number>;
  by_precision: Record<string, number>;
  by_source: Record<string, number>;
  validated: Record<string, number>;
  time_extent: { from: number; to: number } | null;
}

export type BBox = [number, number, number, number]; // minLon, minLat, maxLon, maxLat

export const METHOD_LABELS: Record<Method, string> = {
  native: "Geotagged",
  cime_local: "Inferred (local context)",
  cime_global: "Inferred (graph context)",
  unresolved: "Unresolved",
};
