import { TILE_SIZE, latToY, lonToX, xToLon, yToLat } from "./mercator.js";
import type { BBox, Feature } from "./types.js";

export interface MapCallbacks {
  onViewChange?: () => void;
  onSelectBBox?: (bbox: BBox | null) => void;
  onMarkerClick?: (postId: number) => void;
}

const MIN_ZOOM = 2;
const MAX_ZOOM = 18;

/** Minimal slippy map: canvas tiles (or a blank grid in offline mode) with
 * DOM markers on top. Drag pans, wheel and buttons zoom, shift-drag selects
 * a bbox, Escape/double-click clears the selection. */
export class MapView {
  center: [number, number];
  zoom: number;

  private readonly canvas: HTMLCanvasElement;
  private readonly markerLayer: HTMLDivElement;
  private readonly selectionBox: HTMLDivElement;
  private readonly tiles = new Map<string, HTMLImageElement>();
  private features: Feature[] = [];
  private dragging: { x: number; y: number; select: boolean; sx: number; sy: number } | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly tileUrl: string,
    center: [number, number],
    zoom: number,
    private readonly callbacks: MapCallbacks = {},
  ) {
    this.center = [...center] as [number, number];
    this.zoom = zoom;
    container.classList.add("map-view");
    this.canvas = document.createElement("canvas");
    this.canvas.className = "map-tiles";
    this.markerLayer = document.createElement("div");
    this.markerLayer.className = "marker-layer";
    this.selectionBox = document.createElement("div");
    this.selectionBox.className = "selection-box hidden";
    const zoomIn = document.createElement("button");
    zoomIn.className = "zoom-btn zoom-in";
    zoomIn.textContent = "+";
    zoomIn.addEventListener("click", () => this.setZoom(this.zoom + 1));
    const zoomOut = document.createElement("button");
    zoomOut.className = "zoom-btn zoom-out";
    zoomOut.textContent = "−";
    zoomOut.addEventListener("click", () => this.setZoom(this.zoom - 1));
    container.append(this.canvas, this.markerLayer, this.selectionBox, zoomIn, zoomOut);

    container.addEventListener("mousedown", (e) => this.startDrag(e));
    window.addEventListener("mousemove", (e) => this.moveDrag(e));
    window.addEventListener("mouseup", (e) => this.endDrag(e));
    container.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.setZoom(this.zoom + (e.deltaY < 0 ? 1 : -1));
    });
    container.addEventListener("dblclick", () => this.callbacks.onSelectBBox?.(null));
    this.render();
  }

  private size(): [number, number] {
    const w = this.container.clientWidth || 800;
    const h = this.container.clientHeight || 500;
    return [w, h];
  }

  viewportBBox(): BBox {
    const [w, h] = this.size();
    const cx = lonToX(this.center[1], this.zoom);
    const cy = latToY(this.center[0], this.zoom);
    const minLon = xToLon(cx - w / 2, this.zoom);
    const maxLon = xToLon(cx + w / 2, this.zoom);
    const minLat = yToLat(cy + h / 2, this.zoom);
    const maxLat = yToLat(cy - h / 2, this.zoom);
    return [
      Math.max(-180, minLon),
      Math.max(-90, minLat),
      Math.min(180, maxLon),
      Math.min(90, maxLat),
    ];
  }

  setView(center: [number, number], zoom?: number): void {
    this.center = [...center] as [number, number];
    if (zoom !== undefined) this.zoom = Math.max(MIN_ZOOM, Math.min(MAX_ZOOM, zoom));
    this.render();
    this.callbacks.onViewChange?.();
  }

  setZoom(zoom: number): void {
    this.setView(this.center, zoom);
  }

  /** Replace all markers. One marker per located feature, styled by method
   * and validation state, sized by the API-provided rank score. */
  setMarkers(features: Feature[]): void {
    this.features = features;
    this.markerLayer.replaceChildren();
    for (const feature of features) {
      if (!feature.geometry) continue;
      const marker = document.createElement("div");
      marker.className = this.markerClass(feature);
      marker.dataset["postId"] = String(feature.properties.post_id);
      const score = Math.max(0, Math.min(1, feature.properties.rank_score));
      const px = 10 + Math.round(14 * score);
      marker.style.width = `${px}px`;
      marker.style.height = `${px}px`;
      marker.title = feature.properties.text;
      marker.addEventListener("click", (e) => {
        e.stopPropagation();
        this.callbacks.onMarkerClick?.(feature.properties.post_id);
      });
      this.markerLayer.appendChild(marker);
    }
    this.positionMarkers();
  }

  private markerClass(feature: Feature): string {
    const classes = ["marker", `method-${feature.properties.method}`];
    if (feature.properties.crowd_validated) classes.push("validated");
    if (feature.properties.post_id === this.focusedId) classes.push("focused");
    return classes.join(" ");
  }

  markerCount(): number {
    return this.markerLayer.childElementCount;
  }

  markerElement(postId: number): HTMLElement | null {
    return this.markerLayer.querySelector(`[data-post-id="${postId}"]`);
  }

  /** Restyle one marker in place after its feature changed (validation). */
  updateFeature(updated: Feature): void {
    this.features = this.features.map((f) =>
      f.properties.post_id === updated.properties.post_id ? updated : f,
    );
    const marker = this.markerElement(updated.properties.post_id);
    if (marker) marker.className = this.markerClass(updated);
  }

  private focusedId: number | null = null;

  focusMarker(postId: number): void {
    this.focusedId = postId;
    const feature = this.features.find((f) => f.properties.post_id === postId);
    if (feature?.geometry) {
      const [lon, lat] = feature.geometry.coordinates;
      this.setView([lat, lon]);
    }
    for (const f of this.features) {
      const el = this.markerElement(f.properties.post_id);
      if (el) el.className = this.markerClass(f);
    }
  }

  private positionMarkers(): void {
    const [w, h] = this.size();
    const cx = lonToX(this.center[1], this.zoom);
    const cy = latToY(this.center[0], this.zoom);
    for (const feature of this.features) {
      if (!feature.geometry) continue;
      const el = this.markerElement(feature.properties.post_id);
      if (!el) continue;
      const [lon, lat] = feature.geometry.coordinates;
      const x = lonToX(lon, this.zoom) - cx + w / 2;
      const y = latToY(lat, this.zoom) - cy + h / 2;
      el.style.left = `${Math.round(x)}px`;
      el.style.top = `${Math.round(y)}px`;
    }
  }

  render(): void {
    const [w, h] = this.size();
    this.canvas.width = w;
    this.canvas.height = h;
    const ctx = this.canvas.getContext("2d");
    if (ctx) {
      if (this.tileUrl) this.drawTiles(ctx, w, h);
      else this.drawGrid(ctx, w, h);
    }
    this.positionMarkers();
  }

  private drawGrid(ctx: CanvasRenderingContext2D, w: number, h: number): void {
    ctx.fillStyle = "#eef3f6";
    ctx.fillRect(0, 0, w, h);
    ctx.strokeStyle = "#cdd9e0";
    ctx.lineWidth = 1;
    const step = TILE_SIZE / 2;
    const cx = lonToX(this.center[1], this.zoom) - w / 2;
    const cy = latToY(this.center[0], this.zoom) - h / 2;
    for (let x = -(cx % step); x < w; x += step) {
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, h);
      ctx.stroke();
    }
    for (let y = -(cy % step); y < h; y += step) {
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(w, y);
      ctx.stroke();
    }
  }

  private drawTiles(ctx: CanvasRenderingContext2D, w: number, h: number): void {
    const worldX = lonToX(this.center[1], this.zoom) - w / 2;
    const worldY = latToY(this.center[0], this.zoom) - h / 2;
    const maxTile = 2 ** this.zoom;
    const x0 = Math.floor(worldX / TILE_SIZE);
    const y0 = Math.floor(worldY / TILE_SIZE);
    const x1 = Math.floor((worldX + w) / TILE_SIZE);
    const y1 = Math.floor((worldY + h) / TILE_SIZE);
    for (let tx = x0; tx <= x1; tx++) {
      for (let ty = Math.max(0, y0); ty <= Math.min(maxTile - 1, y1); ty++) {
        const wrapped = ((tx % maxTile) + maxTile) % maxTile;
        const url = this.tileUrl
          .replace("{z}", String(this.zoom))
          .replace("{x}", String(wrapped))
          .replace("{y}", String(ty));
        const dx = tx * TILE_SIZE - worldX;
        const dy = ty * TILE_SIZE - worldY;
        const cached = this.tiles.get(url);
        if (cached && cached.complete) {
          ctx.drawImage(cached, dx, dy);
        } else if (!cached) {
          const img = new Image();
          img.crossOrigin = "anonymous";
          img.onload = () => this.render();
          img.src = url;
          this.tiles.set(url, img);
        }
      }
    }
  }

  private startDrag(e: MouseEvent): void {
    if ((e.target as HTMLElement).classList?.contains("zoom-btn")) return;
    this.dragging = { x: e.clientX, y: e.clientY, select: e.shiftKey, sx: e.clientX, sy: e.clientY };
    if (e.shiftKey) {
      this.selectionBox.classList.remove("hidden");
      e.preventDefault();
    }
  }

  private moveDrag(e: MouseEvent): void {
    if (!this.dragging) return;
    if (this.dragging.select) {
      const rect = this.container.getBoundingClientRect();
      const x = Math.min(this.dragging.sx, e.clientX) - rect.left;
      const y = Math.min(this.dragging.sy, e.clientY) - rect.top;
      this.selectionBox.style.left = `${x}px`;
      this.selectionBox.style.top = `${y}px`;
      this.selectionBox.style.width = `${Math.abs(e.clientX - this.dragging.sx)}px`;
      this.selectionBox.style.height = `${Math.abs(e.clientY - this.dragging.sy)}px`;
      return;
    }
    const dx = e.clientX - this.dragging.x;
    const dy = e.clientY - this.dragging.y;
    this.dragging.x = e.clientX;
    this.dragging.y = e.clientY;
    const cx = lonToX(this.center[1], this.zoom) - dx;
    const cy = latToY(this.center[0], this.zoom) - dy;
    this.center = [yToLat(cy, this.zoom), xToLon(cx, this.zoom)];
    this.render();
  }

  private endDrag(e: MouseEvent): void {
    const drag = this.dragging;
    this.dragging = null;
    if (!drag) return;
    if (drag.select) {
      this.selectionBox.classList.add("hidden");
      const rect = this.container.getBoundingClientRect();
      const [w, h] = this.size();
      const cx = lonToX(this.center[1], this.zoom) - w / 2;
      const cy = latToY(this.center[0], this.zoom) - h / 2;
      const px0 = Math.min(drag.sx, e.clientX) - rect.left + cx;
      const px1 = Math.max(drag.sx, e.clientX) - rect.left + cx;
      const py0 = Math.min(drag.sy, e.clientY) - rect.top + cy;
      const py1 = Math.max(drag.sy, e.clientY) - rect.top + cy;
      if (px1 - px0 > 4 && py1 - py0 > 4) {
        this.callbacks.onSelectBBox?.([
          xToLon(px0, this.zoom),
          yToLat(py1, this.zoom),
          xToLon(px1, this.zoom),
          yToLat(py0, this.zoom),
        ]);
      }
      return;
    }
    this.callbacks.onViewChange?.();
  }
}
