"""Place directory with name and spatial indexes.

Loads a flat TSV extract (e.g. derived offline from OpenStreetMap) into an
immutable in-memory gazetteer that answers name lookups, bbox queries over
centroids, and proximity checks. Immutable after load, so it is safe for
any number of concurrent readers.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .geo import BBox, GridIndex, check_bbox, haversine_m, point_in_bbox, valid_lat, valid_lon

PLACE_CLASSES = ("poi", "street", "locality", "region")

# Representative radius in meters per precision class; strictly increasing
# from finest (poi) to coarsest (region).
DEFAULT_RADII_M: dict[str, float] = {
    "poi": 100.0,
    "street": 500.0,
    "locality": 5_000.0,
    "region": 50_000.0,
}

TSV_COLUMNS = (
    "place_id",
    "canonical_name",
    "alt_names",
    "class",
    "lat",
    "lon",
    "min_lon",
    "min_lat",
    "max_lon",
    "max_lat",
    "admin_parents",
    "importance",
)


class GazetteerError(ValueError):
    """Malformed gazetteer input; message names the offending line and field."""


@dataclass(frozen=True)
class Place:
    place_id: int
    canonical_name: str
    alt_names: tuple[str, ...]
    place_class: str
    centroid: tuple[float, float]  # (lat, lon)
    bbox: BBox
    admin_parents: tuple[int, ...]
    importance: float

    def validate(self) -> None:
        lat, lon = self.centroid
        if not (valid_lat(lat) and valid_lon(lon)):
            raise GazetteerError(f"place {self.place_id}: centroid out of range")
        check_bbox(self.bbox)
        if not point_in_bbox(lat, lon, self.bbox):
            raise GazetteerError(f"place {self.place_id}: bbox does not contain centroid")
        if self.place_class not in PLACE_CLASSES:
            raise GazetteerError(f"place {self.place_id}: unknown class {self.place_class!r}")
        if not 0.0 <= self.importance <= 1.0:
            raise GazetteerError(f"place {self.place_id}: importance outside [0,1]")
        if self.place_id in self.admin_parents:
            raise GazetteerError(f"place {self.place_id}: admin_parents contains the place itself")


def normalize_name(raw: str) -> str:
    """Canonical matching form: lowercase, accents folded, punctuation as
    spaces, whitespace collapsed."""
    decomposed = unicodedata.normalize("NFKD", raw)
    out: list[str] = []
    for ch in decomposed:
        if unicodedata.combining(ch):
            continue
        out.append(ch if ch.isalnum() else " ")
    return " ".join("".join(out).lower().split())


def radii_increasing(radii: dict[str, float]) -> bool:
    return radii["poi"] < radii["street"] < radii["locality"] < radii["region"]


class Gazetteer:
    """Immutable place indexes built by load_gazetteer / load_index."""

    def __init__(self, places: list[Place]):
        self.places: dict[int, Place] = {}
        self.name_index: dict[str, list[int]] = {}
        for place in places:
            place.validate()
            if place.place_id in self.places:
                raise GazetteerError(f"duplicate place_id {place.place_id}")
            self.places[place.place_id] = place
        self._check_parent_cycles()
        for place in self.places.values():
            for name in (place.canonical_name, *place.alt_names):
                norm = normalize_name(name)
                if not norm:
                    continue
                ids = self.name_index.setdefault(norm, [])
                if place.place_id not in ids:
                    ids.append(place.place_id)
        for ids in self.name_index.values():
            ids.sort()
        self.spatial_index = GridIndex.from_points(
            (pid, p.centroid[0], p.centroid[1]) for pid, p in self.places.items()
        )

    def _check_parent_cycles(self) -> None:
        for place in self.places.values():
            for parent_id in place.admin_parents:
                parent = self.places.get(parent_id)
                if parent is not None and place.place_id in parent.admin_parents:
                    raise GazetteerError(
                        f"admin_parents cycle between {place.place_id} and {parent_id}"
                    )

    def __len__(self) -> int:
        return len(self.places)

    def lookup_name(self, name: str) -> list[Place]:
        """Places whose canonical or alt name normalizes to the query,
        sorted by importance descending then place_id ascending."""
        ids = self.name_index.get(normalize_name(name), [])
        places = [self.places[pid] for pid in ids]
        places.sort(key=lambda p: (-p.importance, p.place_id))
        return places

    def places_in_bbox(self, bbox: BBox) -> list[Place]:
        """Places whose centroid lies inside bbox (inclusive edges)."""
        check_bbox(bbox)
        return [self.places[pid] for pid in self.spatial_index.query_bbox(bbox)]

    def nearest(self, lat: float, lon: float) -> Place | None:
        """Place with the closest centroid, ties broken by smaller id."""
        best: tuple[float, int] | None = None
        for pid in sorted(self.places):
            d = haversine_m((lat, lon), self.places[pid].centroid)
            if best is None or d < best[0]:
                best = (d, pid)
        return self.places[best[1]] if best else None

    def save_index(self, path: str | Path) -> None:
        """Write a compiled index file (deterministic JSON, one place per line)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write('{"format": "crisismap-gazetteer", "version": 1}\n')
            for pid in sorted(self.places):
                fh.write(json.dumps(_place_to_record(self.places[pid]), ensure_ascii=False))
                fh.write("\n")


def _place_to_record(p: Place) -> dict:
    return {
        "place_id": p.place_id,
        "canonical_name": p.canonical_name,
        "alt_names": list(p.alt_names),
        "class": p.place_class,
        "lat": p.centroid[0],
        "lon": p.centroid[1],
        "bbox": list(p.bbox),
        "admin_parents": list(p.admin_parents),
        "importance": p.importance,
    }


def _place_from_record(rec: dict) -> Place:
    return Place(
        place_id=int(rec["place_id"]),
        canonical_name=rec["canonical_name"],
        alt_names=tuple(rec["alt_names"]),
        place_class=rec["class"],
        centroid=(float(rec["lat"]), float(rec["lon"])),
        bbox=tuple(float(v) for v in rec["bbox"]),
        admin_parents=tuple(int(v) for v in rec["admin_parents"]),
        importance=float(rec["importance"]),
    )


def _parse_row(lineno: int, row: list[str]) -> Place:
    if len(row) != len(TSV_COLUMNS):
        raise GazetteerError(
            f"line {lineno}: expected {len(TSV_COLUMNS)} fields, got {len(row)}"
        )
    fields = dict(zip(TSV_COLUMNS, row))

    def fail(name: str, detail: str) -> GazetteerError:
        return GazetteerError(f"line {lineno}, field {name!r}: {detail}")

    def parse_float(name: str) -> float:
        try:
            return float(fields[name])
        except ValueError:
            raise fail(name, f"not a number: {fields[name]!r}") from None

    try:
        place_id = int(fields["place_id"])
        if place_id < 0:
            raise ValueError
    except ValueError:
        raise fail("place_id", f"not an unsigned integer: {fields['place_id']!r}") from None
    if not fields["canonical_name"]:
        raise fail("canonical_name", "empty")
    if fields["class"] not in PLACE_CLASSES:
        raise fail("class", f"must be one of {'|'.join(PLACE_CLASSES)}, got {fields['class']!r}")
    lat, lon = parse_float("lat"), parse_float("lon")
    if not valid_lat(lat):
        raise fail("lat", f"out of range: {lat}")
    if not valid_lon(lon):
        raise fail("lon", f"out of range: {lon}")
    bbox = (
        parse_float("min_lon"),
        parse_float("min_lat"),
        parse_float("max_lon"),
        parse_float("max_lat"),
    )
    alt_names = tuple(s for s in fields["alt_names"].split(";") if s)
    try:
        parents = tuple(int(s) for s in fields["admin_parents"].split(";") if s)
    except ValueError:
        raise fail("admin_parents", f"not ids: {fields['admin_parents']!r}") from None
    if fields["importance"]:
        importance = parse_float("importance")
        if not 0.0 <= importance <= 1.0:
            raise fail("importance", f"outside [0,1]: {importance}")
    else:
        importance = 0.5
    place = Place(
        place_id=place_id,
        canonical_name=fields["canonical_name"],
        alt_names=alt_names,
        place_class=fields["class"],
        centroid=(lat, lon),
        bbox=bbox,
        admin_parents=parents,
        importance=importance,
    )
    try:
        place.validate()
    except ValueError as exc:
        raise GazetteerError(f"line {lineno}: {exc}") from None
    return place


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Load a TSV extract (header row + tab-separated place rows)."""
    path = Path(path)
    places: list[Place] = []
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline()
        if header and header.rstrip("\n").split("\t") != list(TSV_COLUMNS):
            raise GazetteerError(f"{path}: unexpected header")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            places.append(_parse_row(lineno, line.split("\t")))
    return Gazetteer(places)


def load_index(path: str | Path) -> Gazetteer:
    """Load a compiled index written by Gazetteer.save_index."""
    places: list[Place] = []
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != "crisismap-gazetteer":
            raise GazetteerError(f"{path}: not a gazetteer index file")
        for line in fh:
            if line.strip():
                places.append(_place_from_record(json.loads(line)))
    return Gazetteer(places)


def load_any(path: str | Path) -> Gazetteer:
    """Load either a TSV extract or a compiled index, sniffing the format."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("{"):
        return load_index(path)
    return load_gazetteer(path)


def write_gazetteer_tsv(path: str | Path, places: list[Place]) -> None:
    """Write places in the TSV extract format (inverse of load_gazetteer)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(TSV_COLUMNS) + "\n")
        for p in places:
            row = (
                str(p.place_id),
                p.canonical_name,
                ";".join(p.alt_names),
                p.place_class,
                repr(p.centroid[0]),
                repr(p.centroid[1]),
                repr(p.bbox[0]),
                repr(p.bbox[1]),
                repr(p.bbox[2]),
                repr(p.bbox[3]),
                ";".join(str(i) for i in p.admin_parents),
                repr(p.importance),
            )
            fh.write("\t".join(row) + "\n")
