"""Embedded spatiotemporal store for (post, geolocation) pairs.

Durability comes from an append-only NDJSON log: every insert is written
and flushed before it is acknowledged, and re-inserting a post_id upserts
its record (last write wins on replay). Queries run against in-memory
indexes (a created_at-sorted list plus a spatial grid over points) and are
answered under a single lock: readers see a fully applied state, writes are
serialized. A torn trailing log line from a crash is dropped with a warning
and the file is truncated back to the last complete record before further
appends.
"""

from __future__ import annotations

import bisect
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from threading import RLock

from .geo import BBox, GridIndex, check_bbox, point_in_bbox
from .geocode import (
    Geolocation,
    geolocation_from_record,
    geolocation_to_record,
)
from .ingest import Post, parse_post_record, post_to_record

log = logging.getLogger(__name__)

LOG_FILENAME = "store.ndjson"

LAYERS = ("native", "cime", "all")
# Precision classes ordered finest first; min_precision keeps classes at
# least as fine as the given one.
FINENESS = ("poi", "street", "locality", "region")


class StoreError(RuntimeError):
    pass


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class StoredItem:
    post: Post
    geo: Geolocation
    inserted_at: int = 0

    def validate(self) -> None:
        if self.post.post_id != self.geo.post_id:
            raise StoreError(
                f"post/geolocation id mismatch: {self.post.post_id} != {self.geo.post_id}"
            )


@dataclass(frozen=True)
class QueryFilter:
    bbox: BBox | None = None
    time_from: int | None = None
    time_to: int | None = None
    layer: str = "all"
    min_precision: str | None = None
    only_with_media: bool = False
    limit: int | None = None

    def validate(self) -> None:
        if self.layer not in LAYERS:
            raise QueryError(f"layer must be one of {'|'.join(LAYERS)}, got {self.layer!r}")
        if self.bbox is not None:
            try:
                check_bbox(self.bbox)
            except ValueError as exc:
                raise QueryError(str(exc)) from None
        if (
            self.time_from is not None
            and self.time_to is not None
            and self.time_from > self.time_to
        ):
            raise QueryError(f"inverted time window: {self.time_from} > {self.time_to}")
        if self.min_precision is not None and self.min_precision not in FINENESS:
            raise QueryError(f"unknown precision class {self.min_precision!r}")
        if self.limit is not None and self.limit < 0:
            raise QueryError("limit must be non-negative")

    def matches(self, item: StoredItem) -> bool:
        post, geo = item.post, item.geo
        if self.bbox is not None:
            if geo.point is None or not point_in_bbox(geo.point[0], geo.point[1], self.bbox):
                return False
        if self.time_from is not None and post.created_at < self.time_from:
            return False
        if self.time_to is not None and post.created_at > self.time_to:
            return False
        if self.layer == "native" and geo.method != "native":
            return False
        if self.layer == "cime" and geo.method not in ("cime_local", "cime_global"):
            return False
        if self.min_precision is not None:
            if geo.precision_class is None:
                return False
            if FINENESS.index(geo.precision_class) > FINENESS.index(self.min_precision):
                return False
        if self.only_with_media and not post.media:
            return False
        return True


def item_to_record(item: StoredItem) -> dict:
    return {
        "post": post_to_record(item.post),
        "geo": geolocation_to_record(item.geo),
        "inserted_at": item.inserted_at,
    }


def item_from_record(rec: dict) -> StoredItem:
    item = StoredItem(
        post=parse_post_record(rec["post"]),
        geo=geolocation_from_record(rec["geo"]),
        inserted_at=int(rec.get("inserted_at", 0)),
    )
    item.validate()
    return item


class Store:
    """Log-backed store; open with Store.open(dir) or Store.in_memory()."""

    def __init__(self, log_path: Path | None):
        self._lock = RLock()
        self._log_path = log_path
        self._items: dict[int, StoredItem] = {}
        # (created_at, post_id) kept sorted for time-window queries.
        self._by_time: list[tuple[int, int]] = []
        # Grid over the points of located items, for bbox queries.
        self._grid = GridIndex()
        self._fh = None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def in_memory(cls) -> "Store":
        return cls(log_path=None)

    @classmethod
    def open(cls, directory: str | Path) -> "Store":
        """Open (creating if needed) a store rooted at a directory; replays
        the append log, dropping a torn trailing record."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        store = cls(log_path=directory / LOG_FILENAME)
        store._replay()
        return store

    def _replay(self) -> None:
        assert self._log_path is not None
        good_offset = 0
        if self._log_path.exists():
            with open(self._log_path, "rb") as fh:
                for line in fh:
                    if not line.endswith(b"\n"):
                        log.warning(
                            "truncated trailing record in %s; dropping it", self._log_path
                        )
                        break
                    try:
                        item = item_from_record(json.loads(line.decode("utf-8")))
                    except (ValueError, KeyError, StoreError) as exc:
                        log.warning(
                            "corrupt trailing record in %s (%s); truncating log there",
                            self._log_path,
                            exc,
                        )
                        break
                    self._apply(item)
                    good_offset += len(line)
            if good_offset < self._log_path.stat().st_size:
                with open(self._log_path, "r+b") as fh:
                    fh.truncate(good_offset)
        self._fh = open(self._log_path, "a", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- writes ------------------------------------------------------------

    def _apply(self, item: StoredItem) -> None:
        pid = item.post.post_id
        previous = self._items.get(pid)
        if previous is not None:
            key = (previous.post.created_at, previous.post.post_id)
            idx = bisect.bisect_left(self._by_time, key)
            del self._by_time[idx]
            if pid in self._grid:
                self._grid.remove(pid)
        self._items[pid] = item
        bisect.insort(self._by_time, (item.post.created_at, pid))
        if item.geo.point is not None:
            self._grid.insert(pid, item.geo.point[0], item.geo.point[1])

    def _append_log(self, items: list[StoredItem]) -> None:
        if self._fh is None:
            return
        try:
            for item in items:
                self._fh.write(json.dumps(item_to_record(item), ensure_ascii=False) + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise StoreError(f"log append failed: {exc}") from exc

    def insert(self, item: StoredItem) -> None:
        """Durably upsert one item: the log write is flushed and synced
        before the in-memory state changes and the call returns."""
        item.validate()
        with self._lock:
            self._append_log([item])
            self._apply(item)

    def insert_many(self, items: list[StoredItem]) -> None:
        """Upsert a batch under one log sync; acknowledged as a whole."""
        for item in items:
            item.validate()
        with self._lock:
            self._append_log(items)
            for item in items:
                self._apply(item)

    # -- reads -------------------------------------------------------------

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def get(self, post_id: int) -> StoredItem | None:
        with self._lock:
            return self._items.get(post_id)

    def all_items(self) -> list[StoredItem]:
        with self._lock:
            return [self._items[pid] for pid in sorted(self._items)]

    def time_extent(self) -> tuple[int, int] | None:
        with self._lock:
            if not self._by_time:
                return None
            return (self._by_time[0][0], self._by_time[-1][0])

    def query(self, flt: QueryFilter) -> list[StoredItem]:
        """Items passing every present predicate, newest first (created_at
        descending, then post_id ascending), truncated to flt.limit."""
        flt.validate()
        with self._lock:
            if flt.bbox is not None:
                candidates = [self._items[pid] for pid in self._grid.query_bbox(flt.bbox)]
            elif flt.time_from is not None or flt.time_to is not None:
                lo = (
                    bisect.bisect_left(self._by_time, (flt.time_from, -1))
                    if flt.time_from is not None
                    else 0
                )
                hi = (
                    bisect.bisect_right(self._by_time, (flt.time_to, float("inf")))
                    if flt.time_to is not None
                    else len(self._by_time)
                )
                candidates = [self._items[pid] for _, pid in self._by_time[lo:hi]]
            else:
                candidates = [self._items[pid] for _, pid in self._by_time]
            hits = [item for item in candidates if flt.matches(item)]
        hits.sort(key=lambda it: (-it.post.created_at, it.post.post_id))
        if flt.limit is not None:
            hits = hits[: flt.limit]
        return hits

    # -- snapshot ----------------------------------------------------------

    def snapshot(self, path: str | Path) -> None:
        """Write a compacted log (one record per post_id, ascending) that
        loads back into a query-equivalent store."""
        with self._lock:
            items = [self._items[pid] for pid in sorted(self._items)]
        tmp = Path(str(path) + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for item in items:
                fh.write(json.dumps(item_to_record(item), ensure_ascii=False))
                fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "Store":
        """Load a log or snapshot file into an in-memory store (read-only:
        later inserts are not persisted to that file)."""
        store = cls.in_memory()
        path = Path(path)
        with open(path, "rb") as fh:
            for line in fh:
                if not line.endswith(b"\n"):
                    log.warning("truncated trailing record in %s; dropping it", path)
                    break
                try:
                    item = item_from_record(json.loads(line.decode("utf-8")))
                except (ValueError, KeyError, StoreError) as exc:
                    log.warning("corrupt record in %s (%s); stopping replay", path, exc)
                    break
                store._apply(item)
        return store
