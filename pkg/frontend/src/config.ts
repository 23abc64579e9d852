export interface AppConfig {
  apiBase: string;
  // z/x/y tile URL template; empty string means offline mode (blank grid).
  tileUrl: string;
  center: [number, number]; // [lat, lon]
  zoom: number;
  // Fallback slider bounds when /api/stats has no time extent.
  defaultTimeFrom: number;
  defaultTimeTo: number;
  maxFeatures: number;
  listSize: number;
}

export const DEFAULT_CONFIG: AppConfig = {
  apiBase: "http://127.0.0.1:8080",
  tileUrl: "",
  center: [50.58, -3.47],
  zoom: 10,
  defaultTimeFrom: 1391558400,
  defaultTimeTo: 1391731200,
  maxFeatures: 500,
  listSize: 15,
};

export async function loadConfig(fetchFn: typeof fetch = fetch): Promise<AppConfig> {
  try {
    const response = await fetchFn("./config.json");
    if (!response.ok) return { ...DEFAULT_CONFIG };
    return { ...DEFAULT_CONFIG, ...(await response.json()) };
  } catch {
    return { ...DEFAULT_CONFIG };
  }
}
