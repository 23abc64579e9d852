"""Toponym extraction and disambiguation.

Mentions are found by greedy longest n-gram matching against the gazetteer
name index. Each candidate place gets a local score from within-post signals
(coherence with unambiguous sibling mentions, an optional event-area prior,
place importance, precision class). Scores are then refined by damped
support propagated over a post-to-post relation graph (retweets, replies,
mentions, shared hashtags); natively geotagged posts act as unit-confidence
anchors. The best surviving candidate becomes the post's geolocation.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .gazetteer import DEFAULT_RADII_M, Gazetteer, Place, normalize_name, radii_increasing
from .geo import BBox, haversine_m, point_in_bbox
from .ingest import Post
from .kvconfig import ConfigError, read_kv_file

METHODS = ("native", "cime_local", "cime_global", "unresolved")
EDGE_KINDS = ("retweet", "reply", "mention", "shared_hashtag")

# Fixed per-class precision term of the local score.
PRECISION_SCORE = {"poi": 1.0, "street": 0.85, "locality": 0.6, "region": 0.3}

# Single-token matches dropped during extraction: function words that
# collide with short place or alt names in dirty extracts.
DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be but by for from had has have he her his i if in
    into is it its me my near no not of on or our out over she so that the
    their them they this to under up was we were what when where which while
    who will with you your""".split()
)

_HASHTAG_SPAN_RE = re.compile(r"#\w+")
_MENTION_SPAN_RE = re.compile(r"@\w+")
_LINK_SPAN_RE = re.compile(r"https?://[^\s]+")
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)
_CAMEL_RUN_RE = re.compile(r"[0-9]+|[A-Z]+|[a-z]+|[^\W\da-zA-Z_]+")

MAX_NGRAM = 4


@dataclass(frozen=True)
class ToponymMention:
    surface: str
    token_span: tuple[int, int]  # [start, end) into the post's token stream
    from_hashtag: bool
    candidates: tuple[int, ...]  # place_ids, duplicate-free, best-first


@dataclass(frozen=True)
class Edge:
    a: int  # smaller post_id
    b: int  # larger post_id
    kind: str
    weight: float


@dataclass
class ContextGraph:
    nodes: set[int]
    edges: list[Edge]

    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        """Neighbor lists with the max edge weight per unordered pair,
        neighbors sorted ascending for deterministic iteration."""
        weights: dict[tuple[int, int], float] = {}
        for e in self.edges:
            for p, q in ((e.a, e.b), (e.b, e.a)):
                key = (p, q)
                if e.weight > weights.get(key, 0.0):
                    weights[key] = e.weight
        adj: dict[int, list[tuple[int, float]]] = {n: [] for n in self.nodes}
        for (p, q), w in sorted(weights.items()):
            adj[p].append((q, w))
        return adj


@dataclass
class CandidateScore:
    """One (post, mention, place) scoring row; mention_idx/place_id are None
    for the pseudo-candidate standing in for a native geotag.

    Invariant: combined == (1 - damping) * local + damping * support.
    """

    post_id: int
    mention_idx: int | None
    place_id: int | None
    lat: float
    lon: float
    local: float
    support: float
    combined: float
    importance: float = 0.0
    place_class: str | None = None
    terms: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    @property
    def pseudo(self) -> bool:
        return self.mention_idx is None


@dataclass
class Geolocation:
    post_id: int
    method: str  # native | cime_local | cime_global | unresolved
    place_id: int | None
    point: tuple[float, float] | None  # (lat, lon)
    precision_class: str | None
    radius_m: float | None
    confidence: float
    evidence: list[str]
    crowd_validated: bool = False
    image_tags: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class GeocodeConfig:
    """Tunables for local scoring and graph propagation. All values are
    artifact defaults chosen for sane toy-scale behavior, not calibrated
    constants."""

    local_decay_m: float = 30_000.0
    global_decay_m: float = 50_000.0
    damping: float = 0.4
    iterations: int = 5
    epsilon: float = 1e-6
    accept_threshold: float = 0.2
    w_coherence: float = 0.4
    w_area: float = 0.25
    w_importance: float = 0.2
    w_precision: float = 0.15
    event_area: BBox | None = None
    w_retweet: float = 1.0
    w_reply: float = 0.8
    w_mention: float = 0.5
    w_shared_hashtag: float = 0.3
    radii_m: tuple[tuple[str, float], ...] = tuple(sorted(DEFAULT_RADII_M.items()))

    def validate(self) -> None:
        weights = (self.w_coherence, self.w_area, self.w_importance, self.w_precision)
        if any(w < 0 for w in weights):
            raise ConfigError("score weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ConfigError(f"score weights must sum to 1, got {sum(weights)}")
        if not 0.0 <= self.damping < 1.0:
            raise ConfigError("damping must be in [0, 1)")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.local_decay_m <= 0 or self.global_decay_m <= 0:
            raise ConfigError("decay distances must be positive")
        for w in (self.w_retweet, self.w_reply, self.w_mention, self.w_shared_hashtag):
            if not 0.0 < w <= 1.0:
                raise ConfigError("edge weights must be in (0, 1]")
        if not radii_increasing(self.radii()):
            raise ConfigError("radii must increase poi < street < locality < region")

    def radii(self) -> dict[str, float]:
        return dict(self.radii_m)

    def edge_weight(self, kind: str) -> float:
        return {
            "retweet": self.w_retweet,
            "reply": self.w_reply,
            "mention": self.w_mention,
            "shared_hashtag": self.w_shared_hashtag,
        }[kind]

    @classmethod
    def from_file(cls, path: str | Path) -> "GeocodeConfig":
        return cls.from_mapping(read_kv_file(path))

    @classmethod
    def from_mapping(cls, raw: dict[str, str]) -> "GeocodeConfig":
        kwargs: dict = {}
        float_keys = (
            "local_decay_m", "global_decay_m", "damping", "epsilon",
            "accept_threshold", "w_coherence", "w_area", "w_importance",
            "w_precision", "w_retweet", "w_reply", "w_mention",
            "w_shared_hashtag",
        )
        radii = dict(DEFAULT_RADII_M)
        for key, value in raw.items():
            try:
                if key in float_keys:
                    kwargs[key] = float(value)
                elif key == "iterations":
                    kwargs[key] = int(value)
                elif key == "event_area":
                    parts = [float(v) for v in value.split(",")]
                    if len(parts) != 4:
                        raise ValueError("expected min_lon,min_lat,max_lon,max_lat")
                    kwargs[key] = tuple(parts)
                elif key.startswith("radius_") and key[len("radius_"):] in radii:
                    radii[key[len("radius_"):]] = float(value)
                else:
                    raise ConfigError(f"unknown config key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from None
        kwargs["radii_m"] = tuple(sorted(radii.items()))
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


def split_hashtag(tag: str) -> list[str]:
    """Split a hashtag body into lowercase words on underscores, digit
    boundaries, and case boundaries ("UKfloods" -> ["uk", "floods"])."""
    words: list[str] = []
    for chunk in tag.split("_"):
        runs = _CAMEL_RUN_RE.findall(chunk)
        i = 0
        while i < len(runs):
            run = runs[i]
            nxt = runs[i + 1] if i + 1 < len(runs) else None
            if run.isupper() and run.isalpha() and nxt and nxt[0].islower() and nxt.isalpha():
                if len(run) == 1:
                    words.append(run + nxt)  # Titlecase word
                elif len(run) == 2:
                    words.append(run)  # short acronym, next word separate
                    words.append(nxt)
                else:
                    words.append(run[:-1])  # acronym keeps all but last upper
                    words.append(run[-1] + nxt)
                i += 2
            else:
                words.append(run)
                i += 1
    return [w.lower() for w in words if w]


def _mask_spans(text: str) -> list[tuple[int, int]]:
    """Character spans to exclude from free-text tokenization: links first
    (they may contain '#'/'@'), then hashtags and mentions outside links."""
    spans = [m.span() for m in _LINK_SPAN_RE.finditer(text)]

    def covered(pos: int) -> bool:
        return any(s <= pos < e for s, e in spans)

    for regex in (_HASHTAG_SPAN_RE, _MENTION_SPAN_RE):
        for m in regex.finditer(text):
            if not covered(m.start()):
                spans.append(m.span())
    return sorted(spans)


def _text_token_groups(text: str) -> list[list[str]]:
    """Tokens of the free text, grouped so that n-grams never span a masked
    entity (hashtag, mention, link)."""
    groups: list[list[str]] = []
    prev = 0
    pieces: list[str] = []
    for start, end in _mask_spans(text):
        pieces.append(text[prev:start])
        prev = end
    pieces.append(text[prev:])
    for piece in pieces:
        tokens = _TOKEN_RE.findall(piece.replace("_", " "))
        if tokens:
            groups.append(tokens)
    return groups


def extract_toponyms(
    post: Post,
    g: Gazetteer,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> list[ToponymMention]:
    """Gazetteer mentions in a post's text and hashtags.

    The token stream is the free-text tokens followed by each hashtag's
    split tokens; token_span indexes into that stream. Matching is greedy
    longest-first (up to 4-grams), left to right, without overlaps, and a
    match never crosses a group boundary (masked entity or hashtag edge).
    """
    groups: list[tuple[list[str], bool]] = [(g_, False) for g_ in _text_token_groups(post.text)]
    seen_tags = set()
    for raw in _HASHTAG_SPAN_RE.findall(post.text):
        body = raw[1:]
        seen_tags.add(body.lower())
        tokens = split_hashtag(body)
        if tokens:
            groups.append((tokens, True))
    for tag in post.hashtags:
        if tag not in seen_tags:
            tokens = split_hashtag(tag)
            if tokens:
                groups.append((tokens, True))

    mentions: list[ToponymMention] = []
    offset = 0
    for tokens, from_hashtag in groups:
        i = 0
        while i < len(tokens):
            advance = 1
            for n in range(min(MAX_NGRAM, len(tokens) - i), 0, -1):
                name = normalize_name(" ".join(tokens[i : i + n]))
                if not name:
                    continue
                places = g.lookup_name(name)
                if not places:
                    continue
                if n == 1 and name in stopwords:
                    break  # dropped; falls through to single-token advance
                candidates = tuple(dict.fromkeys(p.place_id for p in places))
                mentions.append(
                    ToponymMention(
                        surface=" ".join(tokens[i : i + n]),
                        token_span=(offset + i, offset + i + n),
                        from_hashtag=from_hashtag,
                        candidates=candidates,
                    )
                )
                advance = n
                break
            i += advance
        offset += len(tokens)
    return mentions


def build_context_graph(posts: Sequence[Post], cfg: GeocodeConfig) -> ContextGraph:
    """Relation edges between posts: retweets, replies, author mentions, and
    shared hashtags (weight grows with the number of shared tags, capped at
    1). References to post ids outside the corpus create no edges."""
    ids = [p.post_id for p in posts]
    id_set = set(ids)
    if len(id_set) != len(ids):
        raise ValueError("posts must have unique ids")
    by_author: dict[str, list[int]] = {}
    for p in posts:
        by_author.setdefault(p.author_id.lower(), []).append(p.post_id)

    edges: dict[tuple[int, int, str], float] = {}

    def add(a: int, b: int, kind: str, weight: float) -> None:
        if a == b:
            return
        key = (min(a, b), max(a, b), kind)
        if weight > edges.get(key, 0.0):
            edges[key] = weight

    shared_counts: dict[tuple[int, int], int] = {}
    by_tag: dict[str, list[int]] = {}
    for p in posts:
        for tag in set(p.hashtags):
            by_tag.setdefault(tag, []).append(p.post_id)
    for members in by_tag.values():
        members.sort()
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                shared_counts[(a, b)] = shared_counts.get((a, b), 0) + 1
    for (a, b), count in shared_counts.items():
        add(a, b, "shared_hashtag", min(1.0, cfg.w_shared_hashtag * count))

    for p in posts:
        if p.retweet_of is not None and p.retweet_of in id_set:
            add(p.post_id, p.retweet_of, "retweet", cfg.w_retweet)
        if p.reply_to is not None and p.reply_to in id_set:
            add(p.post_id, p.reply_to, "reply", cfg.w_reply)
        for name in p.mentions:
            for other in by_author.get(name.lower(), ()):
                add(p.post_id, other, "mention", cfg.w_mention)

    kind_order = {k: i for i, k in enumerate(EDGE_KINDS)}
    edge_list = [
        Edge(a, b, kind, weight)
        for (a, b, kind), weight in sorted(edges.items(), key=lambda kv: (kv[0][0], kv[0][1], kind_order[kv[0][2]]))
    ]
    return ContextGraph(nodes=id_set, edges=edge_list)


def local_score_terms(
    post: Post,
    mention: ToponymMention,
    candidate: Place,
    g: Gazetteer,
    cfg: GeocodeConfig,
    siblings: Sequence[ToponymMention] = (),
) -> tuple[float, float, float, float]:
    """(coherence, area, importance, precision) terms of the local score.

    Coherence averages distance decay to anchor mentions: sibling mentions
    of the same post that have exactly one candidate. Without anchors (or
    without an event area for the area term) the neutral value is 0.5.
    """
    decays: list[float] = []
    for other in siblings:
        if other is mention or len(other.candidates) != 1:
            continue
        anchor = g.places[other.candidates[0]]
        d = haversine_m(candidate.centroid, anchor.centroid)
        decays.append(math.exp(-d / cfg.local_decay_m))
    coherence = sum(decays) / len(decays) if decays else 0.5
    if cfg.event_area is None:
        area = 0.5
    else:
        area = 1.0 if point_in_bbox(candidate.centroid[0], candidate.centroid[1], cfg.event_area) else 0.0
    return (coherence, area, candidate.importance, PRECISION_SCORE[candidate.place_class])


def score_local(
    post: Post,
    mention: ToponymMention,
    candidate: Place,
    g: Gazetteer,
    cfg: GeocodeConfig,
    siblings: Sequence[ToponymMention] = (),
) -> float:
    coh, area, imp, prec = local_score_terms(post, mention, candidate, g, cfg, siblings)
    return cfg.w_coherence * coh + cfg.w_area * area + cfg.w_importance * imp + cfg.w_precision * prec


def make_candidates(
    post: Post,
    mentions: Sequence[ToponymMention],
    g: Gazetteer,
    cfg: GeocodeConfig,
) -> list[CandidateScore]:
    """Scoring rows for one post: a single unit pseudo-candidate when the
    post carries a native geotag, otherwise one row per (mention, place)."""
    if post.native_geotag is not None:
        lat, lon = post.native_geotag
        return [
            CandidateScore(
                post_id=post.post_id, mention_idx=None, place_id=None,
                lat=lat, lon=lon, local=1.0, support=1.0, combined=1.0,
            )
        ]
    rows: list[CandidateScore] = []
    for mi, mention in enumerate(mentions):
        for pid in mention.candidates:
            place = g.places[pid]
            terms = local_score_terms(post, mention, place, g, cfg, mentions)
            local = (
                cfg.w_coherence * terms[0]
                + cfg.w_area * terms[1]
                + cfg.w_importance * terms[2]
                + cfg.w_precision * terms[3]
            )
            rows.append(
                CandidateScore(
                    post_id=post.post_id,
                    mention_idx=mi,
                    place_id=pid,
                    lat=place.centroid[0],
                    lon=place.centroid[1],
                    local=local,
                    support=0.0,
                    combined=(1.0 - cfg.damping) * local,
                    importance=place.importance,
                    place_class=place.place_class,
                    terms=terms,
                )
            )
    rows.sort(key=lambda r: (r.mention_idx, r.place_id))
    return rows


def propagate_global(
    graph: ContextGraph,
    candidates: dict[int, list[CandidateScore]],
    cfg: GeocodeConfig,
) -> list[float]:
    """Iteratively blend each candidate's local score with support from
    neighbors' candidates, damped by cfg.damping.

    Support for candidate c of post p is the best neighbor contribution
    max_q w(p,q) * max_e combined(e|q) * exp(-dist(c,e)/global_decay_m),
    computed from the previous iteration's scores (double-buffered). Returns
    the per-iteration max absolute score changes; stops early below epsilon.
    """
    order = sorted(candidates)
    adjacency = graph.adjacency()
    rows: list[CandidateScore] = []
    index_of: dict[int, list[int]] = {}
    for pid in order:
        index_of[pid] = []
        for row in candidates[pid]:
            index_of[pid].append(len(rows))
            rows.append(row)

    decay: dict[tuple[int, int], float] = {}
    for pid in order:
        for q, _w in adjacency.get(pid, ()):
            if q not in index_of:
                continue
            for ci in index_of[pid]:
                c = rows[ci]
                if c.pseudo:
                    continue
                for ei in index_of[q]:
                    e = rows[ei]
                    if (ci, ei) not in decay:
                        d = haversine_m((c.lat, c.lon), (e.lat, e.lon))
                        decay[(ci, ei)] = math.exp(-d / cfg.global_decay_m)

    deltas: list[float] = []
    prev = [r.combined for r in rows]
    for _ in range(cfg.iterations):
        max_delta = 0.0
        new = list(prev)
        for pid in order:
            for ci in index_of[pid]:
                row = rows[ci]
                if row.pseudo:
                    continue
                support = 0.0
                for q, w in adjacency.get(pid, ()):
                    if q not in index_of:
                        continue
                    best = 0.0
                    for ei in index_of[q]:
                        v = prev[ei] * decay[(ci, ei)]
                        if v > best:
                            best = v
                    if w * best > support:
                        support = w * best
                row.support = support
                combined = (1.0 - cfg.damping) * row.local + cfg.damping * support
                new[ci] = combined
                change = abs(combined - prev[ci])
                if change > max_delta:
                    max_delta = change
        for ci, row in enumerate(rows):
            row.combined = new[ci]
        prev = new
        deltas.append(max_delta)
        if max_delta < cfg.epsilon:
            break
    return deltas


def _selection_key(row: CandidateScore, score: float) -> tuple:
    # Maximize score, then importance; prefer smaller place_id, then
    # smaller mention index.
    return (score, row.importance, -(row.place_id or 0), -(row.mention_idx or 0))


def _image_tags(post: Post) -> list[str]:
    tags: list[str] = []
    for item in post.media:
        for tag in item.image_tags:
            if tag not in tags:
                tags.append(tag)
    return tags


def geolocate_post(
    post: Post,
    mentions: Sequence[ToponymMention],
    scored: Sequence[CandidateScore],
    cfg: GeocodeConfig,
) -> Geolocation:
    """Pick the post's geolocation from its scored candidates.

    Native geotags pass through untouched. Otherwise the candidate with the
    best combined score wins (ties: higher importance, smaller place_id);
    below the acceptance threshold the post stays unresolved. The method is
    cime_global when propagation changed the winner or lent it any support,
    cime_local when the local score alone decided.
    """
    radii = cfg.radii()
    if post.native_geotag is not None:
        return Geolocation(
            post_id=post.post_id,
            method="native",
            place_id=None,
            point=post.native_geotag,
            precision_class="poi",
            radius_m=radii["poi"],
            confidence=1.0,
            evidence=["native geotag"],
            image_tags=_image_tags(post),
        )
    real = [r for r in scored if not r.pseudo]
    if not real:
        return Geolocation(
            post_id=post.post_id, method="unresolved", place_id=None, point=None,
            precision_class=None, radius_m=None, confidence=0.0,
            evidence=["no toponym mentions"], image_tags=_image_tags(post),
        )
    winner = max(real, key=lambda r: _selection_key(r, r.combined))
    evidence = _evidence_lines(mentions, real, winner)
    if winner.combined < cfg.accept_threshold:
        evidence.append(
            f"top combined score {winner.combined:.4f} below threshold {cfg.accept_threshold:.4f}"
        )
        return Geolocation(
            post_id=post.post_id, method="unresolved", place_id=None, point=None,
            precision_class=None, radius_m=None, confidence=0.0,
            evidence=evidence, image_tags=_image_tags(post),
        )
    local_best = max(real, key=lambda r: _selection_key(r, r.local))
    globally_decided = (
        (local_best.mention_idx, local_best.place_id) != (winner.mention_idx, winner.place_id)
        or winner.support > 0.0
    )
    siblings = sorted(
        (r.combined for r in real if r.mention_idx == winner.mention_idx), reverse=True
    )
    confidence = siblings[0] if len(siblings) == 1 else siblings[0] - siblings[1] / 2.0
    confidence = min(1.0, max(0.0, confidence))
    return Geolocation(
        post_id=post.post_id,
        method="cime_global" if globally_decided else "cime_local",
        place_id=winner.place_id,
        point=(winner.lat, winner.lon),
        precision_class=winner.place_class,
        radius_m=radii[winner.place_class or "locality"],
        confidence=confidence,
        evidence=evidence,
        image_tags=_image_tags(post),
    )


def _evidence_lines(
    mentions: Sequence[ToponymMention],
    rows: Sequence[CandidateScore],
    winner: CandidateScore,
) -> list[str]:
    lines = []
    for row in sorted(rows, key=lambda r: (r.mention_idx, -r.combined, r.place_id)):
        surface = mentions[row.mention_idx].surface if row.mention_idx is not None else "?"
        coh, area, imp, prec = row.terms
        mark = " <- selected" if row is winner else ""
        lines.append(
            f"mention {surface!r} place {row.place_id} ({row.place_class}): "
            f"local={row.local:.4f} [coherence={coh:.4f} area={area:.4f} "
            f"importance={imp:.4f} precision={prec:.4f}] "
            f"support={row.support:.4f} combined={row.combined:.4f}{mark}"
        )
    return lines


def geolocate_corpus(
    posts: Sequence[Post],
    g: Gazetteer,
    cfg: GeocodeConfig | None = None,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> list[Geolocation]:
    """Run the full pipeline over a corpus; output order matches input."""
    cfg = cfg or GeocodeConfig()
    cfg.validate()
    mentions_by_post: dict[int, list[ToponymMention]] = {}
    candidates: dict[int, list[CandidateScore]] = {}
    for post in posts:
        mentions = [] if post.native_geotag is not None else extract_toponyms(post, g, stopwords)
        mentions_by_post[post.post_id] = mentions
        candidates[post.post_id] = make_candidates(post, mentions, g, cfg)
    graph = build_context_graph(posts, cfg)
    propagate_global(graph, candidates, cfg)
    return [
        geolocate_post(post, mentions_by_post[post.post_id], candidates[post.post_id], cfg)
        for post in posts
    ]


def geolocation_to_record(geo: Geolocation) -> dict:
    return {
        "post_id": geo.post_id,
        "method": geo.method,
        "place_id": geo.place_id,
        "lat": None if geo.point is None else geo.point[0],
        "lon": None if geo.point is None else geo.point[1],
        "precision_class": geo.precision_class,
        "radius_m": geo.radius_m,
        "confidence": geo.confidence,
        "evidence": list(geo.evidence),
        "crowd_validated": geo.crowd_validated,
        "image_tags": list(geo.image_tags),
    }


def geolocation_from_record(rec: dict) -> Geolocation:
    point = None
    if rec.get("lat") is not None and rec.get("lon") is not None:
        point = (float(rec["lat"]), float(rec["lon"]))
    return Geolocation(
        post_id=int(rec["post_id"]),
        method=rec["method"],
        place_id=None if rec.get("place_id") is None else int(rec["place_id"]),
        point=point,
        precision_class=rec.get("precision_class"),
        radius_m=None if rec.get("radius_m") is None else float(rec["radius_m"]),
        confidence=float(rec["confidence"]),
        evidence=[str(s) for s in rec.get("evidence", [])],
        crowd_validated=bool(rec.get("crowd_validated", False)),
        image_tags=[str(t) for t in rec.get("image_tags", [])],
    )


def write_geolocations(path: str | Path, geos: Iterable[Geolocation]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for geo in geos:
            fh.write(json.dumps(geolocation_to_record(geo), ensure_ascii=False))
            fh.write("\n")


def read_geolocations(path: str | Path) -> list[Geolocation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(geolocation_from_record(json.loads(line)))
    return out
