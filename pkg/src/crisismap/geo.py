"""Shared geometry helpers: great-circle distance, bounding boxes, and a
uniform grid index over points."""

from __future__ import annotations

import math
from typing import Iterable, Iterator

EARTH_RADIUS_M = 6_371_000.0

# A bbox is (min_lon, min_lat, max_lon, max_lat); a point is (lat, lon).
BBox = tuple[float, float, float, float]
LatLon = tuple[float, float]


class InvalidBBoxError(ValueError):
    pass


def valid_lat(lat: float) -> bool:
    return -90.0 <= lat <= 90.0


def valid_lon(lon: float) -> bool:
    return -180.0 <= lon <= 180.0


def check_point(lat: float, lon: float) -> None:
    if not (valid_lat(lat) and valid_lon(lon)):
        raise ValueError(f"coordinates out of range: lat={lat} lon={lon}")


def check_bbox(bbox: BBox) -> None:
    min_lon, min_lat, max_lon, max_lat = bbox
    if not (valid_lon(min_lon) and valid_lon(max_lon) and valid_lat(min_lat) and valid_lat(max_lat)):
        raise InvalidBBoxError(f"bbox coordinates out of range: {bbox}")
    if min_lon > max_lon or min_lat > max_lat:
        raise InvalidBBoxError(f"inverted bbox: {bbox}")


def point_in_bbox(lat: float, lon: float, bbox: BBox) -> bool:
    """Inclusive containment of a point in a bbox."""
    min_lon, min_lat, max_lon, max_lat = bbox
    return min_lat <= lat <= max_lat and min_lon <= lon <= max_lon


def haversine_m(a: LatLon, b: LatLon) -> float:
    """Great-circle distance in meters between two (lat, lon) points."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


class GridIndex:
    """Uniform-grid point index answering inclusive bbox queries.

    Keys are opaque ids; one point per id. Cell size is in degrees. Queries
    return exactly the ids a linear scan over the stored points would.
    """

    def __init__(self, cell_deg: float = 1.0) -> None:
        if cell_deg <= 0:
            raise ValueError("cell_deg must be positive")
        self._cell = cell_deg
        self._cells: dict[tuple[int, int], set[int]] = {}
        self._points: dict[int, LatLon] = {}

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, key: int) -> bool:
        return key in self._points

    def _cell_of(self, lat: float, lon: float) -> tuple[int, int]:
        return (math.floor(lon / self._cell), math.floor(lat / self._cell))

    def insert(self, key: int, lat: float, lon: float) -> None:
        check_point(lat, lon)
        if key in self._points:
            self.remove(key)
        self._points[key] = (lat, lon)
        self._cells.setdefault(self._cell_of(lat, lon), set()).add(key)

    def remove(self, key: int) -> None:
        lat, lon = self._points.pop(key)
        cell = self._cell_of(lat, lon)
        members = self._cells[cell]
        members.discard(key)
        if not members:
            del self._cells[cell]

    def query_bbox(self, bbox: BBox) -> list[int]:
        """Ids of points inside bbox (inclusive edges), sorted ascending."""
        check_bbox(bbox)
        min_lon, min_lat, max_lon, max_lat = bbox
        cx0, cy0 = self._cell_of(min_lat, min_lon)
        cx1, cy1 = self._cell_of(max_lat, max_lon)
        hits: list[int] = []
        for cx in range(cx0, cx1 + 1):
            for cy in range(cy0, cy1 + 1):
                for key in self._cells.get((cx, cy), ()):
                    lat, lon = self._points[key]
                    if point_in_bbox(lat, lon, bbox):
                        hits.append(key)
        hits.sort()
        return hits

    def items(self) -> Iterator[tuple[int, LatLon]]:
        return iter(self._points.items())

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, float, float]], cell_deg: float = 1.0) -> "GridIndex":
        idx = cls(cell_deg)
        for key, lat, lon in points:
            idx.insert(key, lat, lon)
        return idx
