"""Seeded synthetic disaster scenarios for end-to-end evaluation.

A scenario samples ground-truth places near an event center from a
gazetteer, writes posts whose text embeds the true place name (drawn from
ambiguously named places at a configurable rate), gives an exact fraction
of posts a native geotag at the truth plus small noise, and wires relation
edges (shared hashtags, retweets, author mentions) between posts with
nearby truths. Everything is driven by one seed: same config, same bytes.

The companion gazetteer synthesizer fabricates a place extract matching a
scenario: places inside the event area, far-away decoys reusing the same
names (usually with higher importance, so name lookup alone misleads), and
unrelated distractors.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .gazetteer import Gazetteer, Place
from .geo import haversine_m
from .ingest import MediaItem, Post
from .kvconfig import ConfigError, read_kv_file

M_PER_DEG_LAT = 111_320.0


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 42
    n_posts: int = 1000
    event_center: tuple[float, float] = (50.58, -3.47)
    event_radius_m: float = 30_000.0
    geotag_rate: float = 0.03
    ambiguity_rate: float = 0.3
    relation_density: float = 2.0
    time_span_s: int = 172_800
    start_time: int = 1_391_558_400  # 2014-02-05T00:00:00Z
    template: str = "flood"

    def validate(self) -> None:
        if self.n_posts < 1:
            raise ScenarioError("n_posts must be >= 1")
        for name in ("geotag_rate", "ambiguity_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ScenarioError(f"{name} must be in [0, 1], got {value}")
        if self.relation_density < 0:
            raise ScenarioError("relation_density must be >= 0")
        if self.event_radius_m <= 0:
            raise ScenarioError("event_radius_m must be positive")
        if self.time_span_s < 1:
            raise ScenarioError("time_span_s must be >= 1")
        if self.template not in PHRASES:
            raise ScenarioError(f"unknown template {self.template!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        return cls.from_mapping(read_kv_file(path))

    @classmethod
    def from_mapping(cls, raw: dict[str, str]) -> "ScenarioConfig":
        base = TEMPLATES.get(raw.get("template", "flood"))
        if base is None:
            raise ScenarioError(f"unknown template {raw.get('template')!r}")
        kwargs: dict = {}
        center = list(base.event_center)
        for key, value in raw.items():
            try:
                if key in ("seed", "n_posts", "time_span_s", "start_time"):
                    kwargs[key] = int(value)
                elif key in ("event_radius_m", "geotag_rate", "ambiguity_rate", "relation_density"):
                    kwargs[key] = float(value)
                elif key == "event_center_lat":
                    center[0] = float(value)
                elif key == "event_center_lon":
                    center[1] = float(value)
                elif key == "template":
                    kwargs[key] = value
                else:
                    raise ConfigError(f"unknown scenario key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"scenario key {key!r}: {exc}") from None
        cfg = replace(base, event_center=(center[0], center[1]), **kwargs)
        cfg.validate()
        return cfg


PHRASES: dict[str, tuple[str, ...]] = {
    "flood": (
        "Flooding in {name}",
        "Severe flooding near {name}",
        "{name} is under water",
        "Roads closed around {name} after the flood",
        "Water levels rising fast in {name}",
    ),
    "earthquake": (
        "Strong tremors felt in {name}",
        "Earthquake damage reported near {name}",
        "Buildings evacuated in {name}",
        "Aftershocks continue around {name}",
        "Cracked walls everywhere in {name}",
    ),
    "storm": (
        "Storm surge hitting {name}",
        "Power lines down across {name}",
        "Hurricane winds battering {name}",
        "Flooded streets in {name} after the storm",
        "Roof damage reported in {name}",
    ),
}

ANCHORED_PHRASE = {
    "flood": "Flooding in {name} near {anchor}",
    "earthquake": "Quake damage in {name} near {anchor}",
    "storm": "Storm damage in {name} near {anchor}",
}

TEMPLATES: dict[str, ScenarioConfig] = {
    "flood": ScenarioConfig(),
    "earthquake": ScenarioConfig(
        event_center=(42.70, 13.25),
        event_radius_m=50_000.0,
        time_span_s=259_200,
        start_time=1_471_996_800,  # 2016-08-24T00:00:00Z
        template="earthquake",
    ),
    "storm": ScenarioConfig(
        event_center=(29.76, -95.37),
        event_radius_m=80_000.0,
        time_span_s=345_600,
        start_time=1_503_619_200,  # 2017-08-25T00:00:00Z
        template="storm",
    ),
}

# Fraction of ambiguous-truth posts whose text also names a second,
# unambiguous nearby place (a local-context anchor).
ANCHOR_RATE = 0.25
MEDIA_RATE = 0.3
GEOTAG_NOISE_M = 50.0

_SYLLABLES = (
    "ash", "bel", "cor", "dun", "el", "fen", "gar", "hol", "iv", "kel",
    "lan", "mor", "nor", "os", "pen", "quil", "ros", "sten", "tor", "ul",
    "ver", "wyn", "yar", "zel",
)
_SUFFIXES = ("ton", "ford", "ham", "bridge", "field", "port", "wick", "mere", "by", "stead")


def _offset_point(lat: float, lon: float, east_m: float, north_m: float) -> tuple[float, float]:
    new_lat = lat + north_m / M_PER_DEG_LAT
    new_lat = max(-85.0, min(85.0, new_lat))
    m_per_deg_lon = M_PER_DEG_LAT * max(0.05, math.cos(math.radians(new_lat)))
    new_lon = lon + east_m / m_per_deg_lon
    while new_lon > 180.0:
        new_lon -= 360.0
    while new_lon < -180.0:
        new_lon += 360.0
    return (new_lat, new_lon)


def _point_in_disc(rng: random.Random, center: tuple[float, float], radius_m: float) -> tuple[float, float]:
    r = radius_m * math.sqrt(rng.random())
    theta = rng.random() * 2.0 * math.pi
    return _offset_point(center[0], center[1], r * math.sin(theta), r * math.cos(theta))


def _invent_name(rng: random.Random, used: set[str]) -> str:
    while True:
        name = (rng.choice(_SYLLABLES) + rng.choice(_SYLLABLES) + rng.choice(_SUFFIXES)).capitalize()
        if name.lower() not in used:
            used.add(name.lower())
            return name


def synthesize_gazetteer(
    cfg: ScenarioConfig,
    n_in_area: int = 120,
    decoy_fraction: float = 0.55,
    n_distractors: int = 60,
) -> list[Place]:
    """Fabricate a deterministic place extract for a scenario.

    decoy_fraction of the in-area places get a far-away twin with the same
    canonical name and a typically higher importance, so purely local
    disambiguation tends to pick the wrong one.
    """
    rng = random.Random(cfg.seed ^ 0x5EED)
    used_names: set[str] = set()
    places: list[Place] = []
    next_id = 1001

    def add_place(name: str, lat: float, lon: float, cls: str, importance: float) -> Place:
        nonlocal next_id
        pad = 0.01
        place = Place(
            place_id=next_id,
            canonical_name=name,
            alt_names=(),
            place_class=cls,
            centroid=(lat, lon),
            bbox=(max(-180.0, lon - pad), max(-90.0, lat - pad),
                  min(180.0, lon + pad), min(90.0, lat + pad)),
            admin_parents=(),
            importance=round(importance, 4),
        )
        next_id += 1
        places.append(place)
        return place

    classes = ("locality",) * 11 + ("street",) * 4 + ("poi",) * 3 + ("region",) * 2
    in_area: list[Place] = []
    for _ in range(n_in_area):
        lat, lon = _point_in_disc(rng, cfg.event_center, cfg.event_radius_m * 0.95)
        name = _invent_name(rng, used_names)
        in_area.append(add_place(name, lat, lon, rng.choice(classes), rng.uniform(0.3, 0.7)))

    n_decoys = round(decoy_fraction * n_in_area)
    for original in rng.sample(in_area, n_decoys):
        distance = rng.uniform(500_000.0, 4_000_000.0)
        theta = rng.random() * 2.0 * math.pi
        lat, lon = _offset_point(
            cfg.event_center[0], cfg.event_center[1],
            distance * math.sin(theta), distance * math.cos(theta),
        )
        add_place(original.canonical_name, lat, lon, original.place_class, rng.uniform(0.5, 0.95))

    for _ in range(n_distractors):
        distance = rng.uniform(300_000.0, 5_000_000.0)
        theta = rng.random() * 2.0 * math.pi
        lat, lon = _offset_point(
            cfg.event_center[0], cfg.event_center[1],
            distance * math.sin(theta), distance * math.cos(theta),
        )
        add_place(_invent_name(rng, used_names), lat, lon, rng.choice(classes), rng.uniform(0.2, 0.8))

    return places


@dataclass(frozen=True)
class TruthRow:
    post_id: int
    lat: float
    lon: float
    place_id: int


def _truth_pools(cfg: ScenarioConfig, g: Gazetteer) -> tuple[list[Place], list[Place]]:
    ambiguous: list[Place] = []
    unambiguous: list[Place] = []
    for pid in sorted(g.places):
        place = g.places[pid]
        if haversine_m(place.centroid, cfg.event_center) > cfg.event_radius_m:
            continue
        if len(g.lookup_name(place.canonical_name)) > 1:
            ambiguous.append(place)
        else:
            unambiguous.append(place)
    return ambiguous, unambiguous


def _edge_plan(density: float) -> tuple[int, float, float]:
    """(cluster size, retweet prob, mention prob) hitting ~density expected
    edges per post; see module docstring for the edge kinds involved."""
    if density <= 0:
        return (1, 0.0, 0.0)
    if density < 1.0:
        size = 2
        hashtag_epp = 0.5
    else:
        size = max(2, 1 + math.floor(density))
        hashtag_epp = (size - 1) / 2.0
    remaining = max(0.0, density - hashtag_epp)
    p_retweet = min(1.0, remaining * size / (size - 1))
    remaining -= p_retweet * (size - 1) / size
    p_mention = min(1.0, max(0.0, remaining))
    return (size, p_retweet, p_mention)


def _spatial_clusters(truths: list[Place], ambiguous_flags: list[bool], size: int) -> list[list[int]]:
    """Partition post indices into clusters of `size`, sweeping the event
    area, with ambiguous-truth posts dealt out one per cluster while the
    unambiguous supply lasts."""
    if size <= 1:
        return []
    by_location = sorted(range(len(truths)), key=lambda i: (truths[i].centroid, i))
    ambiguous = [i for i in by_location if ambiguous_flags[i]]
    unambiguous = [i for i in by_location if not ambiguous_flags[i]]
    clusters: list[list[int]] = []
    while ambiguous or unambiguous:
        members: list[int] = []
        if ambiguous:
            members.append(ambiguous.pop(0))
        while len(members) < size and unambiguous:
            members.append(unambiguous.pop(0))
        while len(members) < size and ambiguous:
            members.append(ambiguous.pop(0))
        clusters.append(members)
    return clusters


def _nearest_unambiguous(place: Place, pool: list[Place]) -> Place:
    return min(
        (p for p in pool if p.place_id != place.place_id),
        key=lambda p: (haversine_m(place.centroid, p.centroid), p.place_id),
    )


def generate_scenario(cfg: ScenarioConfig, g: Gazetteer) -> tuple[list[Post], list[TruthRow]]:
    cfg.validate()
    rng = random.Random(cfg.seed)
    ambiguous_pool, unambiguous_pool = _truth_pools(cfg, g)
    if not unambiguous_pool:
        raise ScenarioError("gazetteer has no unambiguously named places inside the event area")
    if cfg.ambiguity_rate > 0 and not ambiguous_pool:
        raise ScenarioError("ambiguity_rate > 0 but no ambiguously named places inside the event area")

    n = cfg.n_posts
    times = sorted(cfg.start_time + rng.randrange(cfg.time_span_s) for _ in range(n))
    truths: list[Place] = []
    ambiguous_flags: list[bool] = []
    for _ in range(n):
        pick_ambiguous = rng.random() < cfg.ambiguity_rate and bool(ambiguous_pool)
        pool = ambiguous_pool if pick_ambiguous else unambiguous_pool
        truths.append(rng.choice(pool))
        ambiguous_flags.append(pick_ambiguous)

    n_geotagged = round(cfg.geotag_rate * n)
    geotagged = set(rng.sample(range(n), n_geotagged))

    # Relation edges come from spatial clusters: posts with nearby truths
    # share hashtags and retweet a cluster seed. Ambiguously named posts are
    # spread across clusters (never concentrated in one), otherwise
    # same-name neighbors would reinforce the decoy as much as the truth.
    size, p_retweet, p_mention = _edge_plan(cfg.relation_density)
    clusters = _spatial_clusters(truths, ambiguous_flags, size)

    hashtags: list[list[str]] = [[] for _ in range(n)]
    retweet_of: list[int | None] = [None] * n
    mentions: list[list[str]] = [[] for _ in range(n)]
    for ci, members in enumerate(clusters):
        tags = [f"{cfg.template}{ci}a", f"{cfg.template}{ci}b"]
        unambiguous_members = [i for i in members if not ambiguous_flags[i]]
        seed_post = min(unambiguous_members) if unambiguous_members else min(members)
        for i in members:
            hashtags[i].extend(tags)
            if i != seed_post and rng.random() < p_retweet:
                retweet_of[i] = seed_post + 1  # post ids are 1-based
            if len(members) > 1 and rng.random() < p_mention:
                other = rng.choice([m for m in members if m != i])
                mentions[i].append(f"u{other + 1}")

    posts: list[Post] = []
    truth_rows: list[TruthRow] = []
    for i in range(n):
        post_id = i + 1
        place = truths[i]
        phrases = PHRASES[cfg.template]
        if ambiguous_flags[i] and rng.random() < ANCHOR_RATE and len(unambiguous_pool) > 1:
            anchor = _nearest_unambiguous(place, unambiguous_pool)
            text = ANCHORED_PHRASE[cfg.template].format(
                name=place.canonical_name, anchor=anchor.canonical_name
            )
        else:
            text = rng.choice(phrases).format(name=place.canonical_name)
        geotag = None
        if i in geotagged:
            east = rng.uniform(-GEOTAG_NOISE_M, GEOTAG_NOISE_M)
            north = rng.uniform(-GEOTAG_NOISE_M, GEOTAG_NOISE_M)
            geotag = _offset_point(place.centroid[0], place.centroid[1], east, north)
        media = ()
        if rng.random() < MEDIA_RATE:
            tags = ("flood", "water", "damage", "street")
            media = (
                MediaItem(
                    url=f"https://pic.example/{post_id}.jpg",
                    kind="image",
                    image_tags=tuple(rng.sample(tags, rng.randrange(0, 3))),
                ),
            )
        posts.append(
            Post(
                post_id=post_id,
                source="twitter",
                author_id=f"u{post_id}",
                created_at=times[i],
                text=text,
                hashtags=tuple(t.lower() for t in hashtags[i]),
                mentions=tuple(mentions[i]),
                retweet_of=retweet_of[i],
                native_geotag=geotag,
                media=media,
            )
        )
        truth_rows.append(
            TruthRow(post_id=post_id, lat=place.centroid[0], lon=place.centroid[1], place_id=place.place_id)
        )
    return posts, truth_rows


def write_truth(path: str | Path, rows: list[TruthRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["post_id", "lat", "lon", "place_id"])
        for row in rows:
            writer.writerow([row.post_id, repr(row.lat), repr(row.lon), row.place_id])


def read_truth(path: str | Path) -> dict[int, TruthRow]:
    out: dict[int, TruthRow] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for i, row in enumerate(reader):
            if i == 0 and row and row[0] == "post_id":
                continue
            if not row:
                continue
            if len(row) != 4:
                raise ScenarioError(f"{path}: truth row {i + 1} must have 4 columns")
            truth = TruthRow(
                post_id=int(row[0]), lat=float(row[1]), lon=float(row[2]), place_id=int(row[3])
            )
            out[truth.post_id] = truth
    return out
