import { ApiClient, isAbortError } from "./api.js";
import type { AppConfig } from "./config.js";
import { MapView } from "./map.js";
import { renderDetail, renderNotFound } from "./popup.js";
import { RankingPanel } from "./ranking.js";
import { debounce, layerParam, type ViewState } from "./state.js";
import type { BBox, Feature, FeatureCollection } from "./types.js";

function checkbox(id: string, label: string, checked: boolean): [HTMLLabelElement, HTMLInputElement] {
  const wrap = document.createElement("label");
  wrap.className = "layer-toggle";
  const input = document.createElement("input");
  input.type = "checkbox";
  input.id = id;
  input.checked = checked;
  const span = document.createElement("span");
  span.textContent = label;
  wrap.append(input, span);
  return [wrap, input];
}

/** Top-level wiring: view state, fetch-and-render with latest-wins and
 * debounced viewport/slider updates, the detail panel, and the ranking
 * sidebar. The client computes nothing itself; it renders API responses. */
export class App {
  readonly map: MapView;
  readonly ranking: RankingPanel;
  readonly state: ViewState;
  lastCollection: FeatureCollection | null = null;

  private readonly banner: HTMLElement;
  private readonly detailHost: HTMLElement;
  private readonly nativeToggle: HTMLInputElement;
  private readonly cimeToggle: HTMLInputElement;
  private readonly timeFromInput: HTMLInputElement;
  private readonly timeToInput: HTMLInputElement;
  private readonly timeLabel: HTMLElement;
  private readonly clearBBoxBtn: HTMLButtonElement;
  private readonly debouncedRefresh: () => void;
  private inflight: Promise<void>[] = [];
  requestCount = 0;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly config: AppConfig,
  ) {
    this.state = {
      center: [...config.center] as [number, number],
      zoom: config.zoom,
      selectedBBox: null,
      timeFrom: config.defaultTimeFrom,
      timeTo: config.defaultTimeTo,
      showNative: true,
      showCime: true,
      ranking: null,
      selectedPostId: null,
    };

    root.classList.add("app-root");
    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const [nativeWrap, nativeInput] = checkbox("toggle-native", "Geotagged layer", true);
    const [cimeWrap, cimeInput] = checkbox("toggle-cime", "Inferred layer", true);
    this.nativeToggle = nativeInput;
    this.cimeToggle = cimeInput;
    toolbar.append(nativeWrap, cimeWrap);

    const timeControls = document.createElement("div");
    timeControls.className = "time-controls";
    this.timeFromInput = document.createElement("input");
    this.timeFromInput.type = "range";
    this.timeFromInput.className = "time-from";
    this.timeToInput = document.createElement("input");
    this.timeToInput.type = "range";
    this.timeToInput.className = "time-to";
    this.timeLabel = document.createElement("span");
    this.timeLabel.className = "time-label";
    timeControls.append(this.timeFromInput, this.timeToInput, this.timeLabel);
    toolbar.appendChild(timeControls);

    this.clearBBoxBtn = document.createElement("button");
    this.clearBBoxBtn.className = "clear-bbox hidden";
    this.clearBBoxBtn.textContent = "clear area";
    toolbar.appendChild(this.clearBBoxBtn);
    root.appendChild(toolbar);

    const main = document.createElement("div");
    main.className = "main-row";
    const mapContainer = document.createElement("div");
    mapContainer.className = "map-container";
    const sidebar = document.createElement("aside");
    sidebar.className = "sidebar";
    main.append(mapContainer, sidebar);
    root.appendChild(main);

    this.detailHost = document.createElement("div");
    this.detailHost.className = "detail-host";
    root.appendChild(this.detailHost);

    this.banner = document.createElement("div");
    this.banner.className = "banner hidden";
    root.appendChild(this.banner);

    this.map = new MapView(mapContainer, config.tileUrl, this.state.center, this.state.zoom, {
      onViewChange: () => {
        this.state.center = this.map.center;
        this.state.zoom = this.map.zoom;
        this.debouncedRefresh();
      },
      onSelectBBox: (bbox) => this.setSelectedBBox(bbox),
      onMarkerClick: (postId) => void this.openDetail(postId),
    });

    this.ranking = new RankingPanel(sidebar, {
      onApply: (params) =>
        this.track(
          (async () => {
            const accepted = await this.api.putRanking(params);
            this.state.ranking = accepted;
            await this.refreshNow();
          })(),
        ),
      onFocus: (postId) => {
        this.map.focusMarker(postId);
        void this.openDetail(postId);
      },
    });

    this.debouncedRefresh = debounce(() => void this.track(this.refreshNow()), 250);
    this.nativeToggle.addEventListener("change", () => {
      this.state.showNative = this.nativeToggle.checked;
      void this.track(this.refreshNow());
    });
    this.cimeToggle.addEventListener("change", () => {
      this.state.showCime = this.cimeToggle.checked;
      void this.track(this.refreshNow());
    });
    const onSlider = () => {
      this.state.timeFrom = Number(this.timeFromInput.value);
      this.state.timeTo = Number(this.timeToInput.value);
      this.renderTimeLabel();
      this.debouncedRefresh();
    };
    this.timeFromInput.addEventListener("input", onSlider);
    this.timeToInput.addEventListener("input", onSlider);
    this.clearBBoxBtn.addEventListener("click", () => this.setSelectedBBox(null));
  }

  /** Load slider bounds and live ranking params, then do the first fetch. */
  async init(): Promise<void> {
    try {
      const stats = await this.api.getStats();
      if (stats.time_extent) {
        this.setTimeBounds(stats.time_extent.from, stats.time_extent.to);
      } else {
        this.setTimeBounds(this.config.defaultTimeFrom, this.config.defaultTimeTo);
      }
    } catch {
      this.setTimeBounds(this.config.defaultTimeFrom, this.config.defaultTimeTo);
    }
    try {
      this.ranking.setParams(await this.api.getRanking());
    } catch {
      // ranking endpoint unavailable; panel stays at defaults
    }
    await this.refreshNow();
  }

  private setTimeBounds(from: number, to: number): void {
    for (const input of [this.timeFromInput, this.timeToInput]) {
      input.min = String(from);
      input.max = String(to);
    }
    this.timeFromInput.value = String(from);
    this.timeToInput.value = String(to);
    this.state.timeFrom = from;
    this.state.timeTo = to;
    this.renderTimeLabel();
  }

  private renderTimeLabel(): void {
    const fmt = (s: number) => new Date(s * 1000).toISOString().slice(0, 16).replace("T", " ");
    this.timeLabel.textContent = `${fmt(this.state.timeFrom)} → ${fmt(this.state.timeTo)} UTC`;
  }

  setSelectedBBox(bbox: BBox | null): void {
    this.state.selectedBBox = bbox;
    this.clearBBoxBtn.classList.toggle("hidden", bbox === null);
    void this.track(this.refreshNow());
  }

  private track(p: Promise<void>): Promise<void> {
    this.inflight.push(p);
    return p.finally(() => {
      this.inflight = this.inflight.filter((q) => q !== p);
    });
  }

  /** Settles when all currently running fetch/render work has finished,
   * including promise continuations scheduled right behind it. */
  async idle(): Promise<void> {
    while (this.inflight.length > 0) {
      await Promise.allSettled(this.inflight);
    }
    for (let i = 0; i < 10; i++) await Promise.resolve();
  }

  async refreshNow(): Promise<void> {
    const layer = layerParam(this.state);
    if (layer === null) {
      this.lastCollection = null;
      this.map.setMarkers([]);
      this.ranking.renderList([], this.config.listSize);
      return;
    }
    const bbox = this.state.selectedBBox ?? this.map.viewportBBox();
    this.requestCount += 1;
    try {
      const collection = await this.api.fetchPosts({
        layer,
        bbox,
        from: this.state.timeFrom,
        to: this.state.timeTo,
        limit: this.config.maxFeatures,
      });
      this.lastCollection = collection;
      this.map.setMarkers(collection.features);
      this.ranking.renderList(collection.features, this.config.listSize);
      this.clearBanner();
    } catch (err) {
      if (isAbortError(err)) return; // superseded by a newer request
      this.showBanner(err instanceof Error ? err.message : "request failed");
    }
  }

  async openDetail(postId: number): Promise<void> {
    this.state.selectedPostId = postId;
    let panel: HTMLElement;
    try {
      const feature = await this.api.fetchDetail(postId);
      panel = renderDetail(feature, {
        onValidate: (id, validated) => void this.track(this.validatePost(id, validated)),
      });
    } catch (err) {
      if (err instanceof Error && "status" in err && (err as { status: number }).status === 404) {
        panel = renderNotFound();
      } else {
        this.showBanner(err instanceof Error ? err.message : "detail failed");
        return;
      }
    }
    this.detailHost.replaceChildren(panel);
  }

  private async validatePost(postId: number, validated: boolean): Promise<void> {
    try {
      const updated = await this.api.validate(postId, validated);
      this.map.updateFeature(updated);
      await this.openDetail(postId); // re-render with the fresh evidence
    } catch (err) {
      this.showBanner(err instanceof Error ? err.message : "validation failed");
    }
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.remove("hidden");
  }

  private clearBanner(): void {
    this.banner.classList.add("hidden");
    this.banner.textContent = "";
  }

  bannerMessage(): string | null {
    return this.banner.classList.contains("hidden") ? null : this.banner.textContent;
  }

  // Test/bootstrap accessors for the layer toggle inputs.
  toggles(): { native: HTMLInputElement; cime: HTMLInputElement } {
    return { native: this.nativeToggle, cime: this.cimeToggle };
  }

  timeInputs(): { from: HTMLInputElement; to: HTMLInputElement } {
    return { from: this.timeFromInput, to: this.timeToInput };
  }

  detailPanel(): HTMLElement | null {
    return this.detailHost.firstElementChild as HTMLElement | null;
  }

  markerFeatures(): Feature[] {
    return this.lastCollection?.features ?? [];
  }
}
