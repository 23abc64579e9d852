import { METHOD_LABELS, type Feature } from "./types.js";

export interface PopupHandlers {
  onValidate: (postId: number, validated: boolean) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderNotFound(): HTMLElement {
  const panel = el("div", "detail-panel");
  panel.appendChild(el("p", "not-found", "post no longer available"));
  return panel;
}

/** Detail panel for one post: text, media, analysis badges, evidence trace,
 * outbound links, and the crowd-validation toggle. Every displayed value
 * comes straight from the API payload. */
export function renderDetail(feature: Feature, handlers: PopupHandlers): HTMLElement {
  const props = feature.properties;
  const panel = el("div", "detail-panel");
  panel.dataset["postId"] = String(props.post_id);

  const head = el("div", "detail-head");
  head.appendChild(el("span", "source-tag", props.source));
  head.appendChild(
    el("span", "timestamp", new Date(props.created_at * 1000).toISOString().replace(".000Z", "Z")),
  );
  panel.appendChild(head);
  panel.appendChild(el("p", "post-text", props.text));

  if (props.media.length > 0) {
    const gallery = el("div", "media-gallery");
    for (const media of props.media) {
      if (media.kind === "image") {
        const img = el("img", "media-thumb");
        img.src = media.url;
        img.loading = "lazy";
        img.alt = media.image_tags.join(", ") || "post image";
        gallery.appendChild(img);
      } else {
        const link = el("a", "media-video-link", "▶ video");
        link.href = media.url;
        link.target = "_blank";
        gallery.appendChild(link);
      }
      for (const tag of media.image_tags) {
        gallery.appendChild(el("span", "image-tag", tag));
      }
    }
    panel.appendChild(gallery);
  }

  const analysis = el("div", "analysis");
  analysis.appendChild(el("span", `badge method-${props.method}`, METHOD_LABELS[props.method]));
  if (props.precision_class) {
    analysis.appendChild(
      el("span", "badge precision", `${props.precision_class} (±${props.radius_m} m)`),
    );
  }
  analysis.appendChild(el("span", "badge confidence", `confidence ${props.confidence.toFixed(2)}`));
  const validatedBadge = el(
    "span",
    `badge validated-state ${props.crowd_validated ? "on" : "off"}`,
    props.crowd_validated ? "crowd validated" : "not validated",
  );
  analysis.appendChild(validatedBadge);
  panel.appendChild(analysis);

  if (props.evidence && props.evidence.length > 0) {
    const details = el("details", "evidence");
    details.appendChild(el("summary", undefined, "scoring trace"));
    const pre = el("pre");
    pre.textContent = props.evidence.join("\n");
    details.appendChild(pre);
    panel.appendChild(details);
  }

  const links = el("div", "detail-links");
  const original = el("a", "original-link", "original post");
  original.href = props.original_post_url;
  original.target = "_blank";
  links.appendChild(original);
  if (props.streetview_url) {
    const street = el("a", "streetview-link", "Street View");
    street.href = props.streetview_url;
    street.target = "_blank";
    links.appendChild(street);
  }
  panel.appendChild(links);

  const validate = el("button", "validate-btn");
  validate.textContent = props.crowd_validated ? "remove validation" : "validate location";
  validate.addEventListener("click", () =>
    handlers.onValidate(props.post_id, !props.crowd_validated),
  );
  panel.appendChild(validate);
  return panel;
}
