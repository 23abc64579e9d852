import type { Feature, RankingParams } from "./types.js";

export interface RankingPanelHandlers {
  onApply: (params: RankingParams) => Promise<void>;
  onFocus: (postId: number) => void;
}

const WEIGHT_FIELDS: Array<{ key: keyof RankingParams; label: string }> = [
  { key: "w_precision", label: "precision" },
  { key: "w_confidence", label: "confidence" },
  { key: "w_recency", label: "recency" },
  { key: "w_validated", label: "validated" },
];

/** Live ranking controls plus the ranked side list. Apply PUTs the weights
 * and the caller refetches; a rejected update shows an inline message and
 * rolls the inputs back to the last accepted params. */
export class RankingPanel {
  readonly root: HTMLElement;
  private inputs = new Map<keyof RankingParams, HTMLInputElement>();
  private errorBox: HTMLElement;
  private listBox: HTMLElement;
  private current: RankingParams | null = null;

  constructor(
    container: HTMLElement,
    private readonly handlers: RankingPanelHandlers,
  ) {
    this.root = container;
    container.classList.add("ranking-panel");
    const title = document.createElement("h3");
    title.textContent = "Ranking";
    container.appendChild(title);

    for (const field of WEIGHT_FIELDS) {
      container.appendChild(this.sliderRow(field.key, field.label));
    }
    const halflifeRow = document.createElement("label");
    halflifeRow.className = "weight-row";
    const span = document.createElement("span");
    span.textContent = "halflife (s)";
    const halflife = document.createElement("input");
    halflife.type = "number";
    halflife.min = "1";
    halflife.step = "600";
    halflife.className = "halflife-input";
    this.inputs.set("recency_halflife_s", halflife);
    halflifeRow.append(span, halflife);
    container.appendChild(halflifeRow);

    const apply = document.createElement("button");
    apply.className = "apply-ranking";
    apply.textContent = "Apply";
    apply.addEventListener("click", () => void this.apply());
    container.appendChild(apply);

    this.errorBox = document.createElement("div");
    this.errorBox.className = "ranking-error hidden";
    container.appendChild(this.errorBox);

    const listTitle = document.createElement("h3");
    listTitle.textContent = "Top posts";
    container.appendChild(listTitle);
    this.listBox = document.createElement("ol");
    this.listBox.className = "ranked-list";
    container.appendChild(this.listBox);
  }

  private sliderRow(key: keyof RankingParams, label: string): HTMLElement {
    const row = document.createElement("label");
    row.className = "weight-row";
    const span = document.createElement("span");
    span.textContent = label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "2";
    input.step = "0.05";
    input.className = `weight-slider weight-${key}`;
    this.inputs.set(key, input);
    const value = document.createElement("output");
    input.addEventListener("input", () => {
      value.textContent = input.value;
    });
    row.append(span, input, value);
    return row;
  }

  setParams(params: RankingParams): void {
    this.current = params;
    for (const [key, input] of this.inputs) {
      input.value = String(params[key]);
      const output = input.parentElement?.querySelector("output");
      if (output) output.textContent = input.value;
    }
    this.hideError();
  }

  readParams(): RankingParams {
    const read = (key: keyof RankingParams) => Number(this.inputs.get(key)?.value ?? 0);
    return {
      w_precision: read("w_precision"),
      w_confidence: read("w_confidence"),
      w_recency: read("w_recency"),
      w_validated: read("w_validated"),
      recency_halflife_s: read("recency_halflife_s"),
    };
  }

  private async apply(): Promise<void> {
    const requested = this.readParams();
    try {
      await this.handlers.onApply(requested);
      this.current = requested;
      this.hideError();
    } catch (err) {
      this.errorBox.textContent = err instanceof Error ? err.message : "update rejected";
      this.errorBox.classList.remove("hidden");
      if (this.current) this.setParamsKeepError(this.current);
    }
  }

  private setParamsKeepError(params: RankingParams): void {
    for (const [key, input] of this.inputs) {
      input.value = String(params[key]);
    }
  }

  private hideError(): void {
    this.errorBox.classList.add("hidden");
    this.errorBox.textContent = "";
  }

  errorMessage(): string | null {
    return this.errorBox.classList.contains("hidden") ? null : this.errorBox.textContent;
  }

  /** Render the ranked side list; scores shown verbatim from the API. */
  renderList(features: Feature[], listSize: number): void {
    this.listBox.replaceChildren();
    for (const feature of features.slice(0, listSize)) {
      const item = document.createElement("li");
      item.className = "ranked-item";
      item.dataset["postId"] = String(feature.properties.post_id);
      const score = document.createElement("span");
      score.className = "ranked-score";
      score.textContent = feature.properties.rank_score.toFixed(3);
      const text = document.createElement("span");
      text.className = "ranked-text";
      text.textContent = feature.properties.text;
      item.append(score, text);
      item.addEventListener("click", () => this.handlers.onFocus(feature.properties.post_id));
      this.listBox.appendChild(item);
    }
  }

  listedIds(): number[] {
    return Array.from(this.listBox.children).map((li) =>
      Number((li as HTMLElement).dataset["postId"]),
    );
  }
}
