"""GeoJSON-over-HTTP service for the webGIS client.

Endpoints: spatiotemporal post queries as a FeatureCollection, per-post
detail with the scoring trace, crowd validation, live ranking parameters,
and corpus stats. Responses are deterministic for a fixed store, ranking
parameters, and query: ranking recency is evaluated against the corpus
clock (max created_at) unless the request overrides `now`.
"""

from __future__ import annotations

import dataclasses
import json
import time
from datetime import datetime, timezone
from threading import Lock

from fastapi import FastAPI, Request, Response

from .geocode import Geolocation
from .ingest import Post
from .ranking import RankingParams, RankingParamsError, rank_score
from .store import FINENESS, LAYERS, QueryError, QueryFilter, Store, StoredItem

GEOJSON_MEDIA_TYPE = "application/geo+json"

ORIGINAL_POST_URL = {
    "twitter": "https://twitter.com/{author}/status/{id}",
    "flickr": "https://www.flickr.com/photos/{author}/{id}",
    "youtube": "https://www.youtube.com/watch?v={id}",
    "instagram": "https://www.instagram.com/p/{id}/",
}

STREETVIEW_URL = "https://www.google.com/maps?layer=c&cbll={lat},{lon}"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class RankingState:
    """Current ranking parameters; replaced atomically, never mutated."""

    def __init__(self, params: RankingParams | None = None):
        self._lock = Lock()
        self._params = params or RankingParams()

    def get(self) -> RankingParams:
        with self._lock:
            return self._params

    def put(self, params: RankingParams) -> None:
        params.validate()
        with self._lock:
            self._params = params


def _json_response(payload, status: int = 200, media_type: str = "application/json") -> Response:
    body = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type=media_type)


def _parse_bbox(raw: str) -> tuple[float, float, float, float]:
    parts = raw.split(",")
    if len(parts) != 4:
        raise ApiError(400, "bad_bbox", f"bbox must be minLon,minLat,maxLon,maxLat: {raw!r}")
    try:
        bbox = tuple(float(p) for p in parts)
    except ValueError:
        raise ApiError(400, "bad_bbox", f"bbox has non-numeric parts: {raw!r}") from None
    return bbox


def _parse_timestamp(raw: str, param: str) -> int:
    try:
        dt = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise ApiError(400, "bad_timestamp", f"{param} is not ISO-8601: {raw!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _parse_bool(raw: str, param: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise ApiError(400, "bad_flag", f"{param} must be true or false: {raw!r}")


def feature_properties(
    post: Post, geo: Geolocation, score: float, with_evidence: bool = False
) -> dict:
    props = {
        "post_id": post.post_id,
        "source": post.source,
        "created_at": post.created_at,
        "text": post.text,
        "method": geo.method,
        "precision_class": geo.precision_class,
        "radius_m": geo.radius_m,
        "confidence": geo.confidence,
        "crowd_validated": geo.crowd_validated,
        "rank_score": score,
        "media": [
            {
                "url": m.url,
                "kind": m.kind,
                "origin": m.origin,
                "image_tags": list(m.image_tags),
            }
            for m in post.media
        ],
        "image_tags": list(geo.image_tags),
        "original_post_url": ORIGINAL_POST_URL[post.source].format(
            author=post.author_id, id=post.post_id
        ),
    }
    if geo.point is not None:
        props["streetview_url"] = STREETVIEW_URL.format(lat=geo.point[0], lon=geo.point[1])
    if with_evidence:
        props["evidence"] = list(geo.evidence)
    return props


def build_feature(post: Post, geo: Geolocation, score: float, with_evidence: bool = False) -> dict:
    geometry = None
    if geo.point is not None:
        geometry = {"type": "Point", "coordinates": [geo.point[1], geo.point[0]]}
    return {
        "type": "Feature",
        "geometry": geometry,
        "properties": feature_properties(post, geo, score, with_evidence),
    }


def create_app(store: Store, ranking: RankingState | None = None, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="crisismap", docs_url=None, redoc_url=None)
    state = ranking or RankingState()

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError) -> Response:
        return _json_response({"error": exc.code, "message": exc.message}, status=exc.status)

    def corpus_now() -> int:
        extent = store.time_extent()
        return extent[1] if extent is not None else 0

    def ranked_items(items: list[StoredItem], now: int) -> list[tuple[StoredItem, float]]:
        params = state.get()
        scored = [(item, rank_score(item.geo, item.post, params, now)) for item in items]
        scored.sort(key=lambda pair: (-pair[1], pair[0].post.post_id))
        return scored

    @app.get("/api/posts")
    async def get_posts(request: Request) -> Response:
        q = request.query_params
        bbox = _parse_bbox(q["bbox"]) if "bbox" in q else None
        time_from = _parse_timestamp(q["from"], "from") if "from" in q else None
        time_to = _parse_timestamp(q["to"], "to") if "to" in q else None
        layer = q.get("layer", "all")
        if layer not in LAYERS:
            raise ApiError(400, "bad_layer", f"layer must be one of {'|'.join(LAYERS)}: {layer!r}")
        min_precision = q.get("min_precision")
        if min_precision is not None and min_precision not in FINENESS:
            raise ApiError(
                400, "bad_precision",
                f"min_precision must be one of {'|'.join(FINENESS)}: {min_precision!r}",
            )
        limit = None
        if "limit" in q:
            try:
                limit = int(q["limit"])
                if limit < 0:
                    raise ValueError
            except ValueError:
                raise ApiError(400, "bad_limit", f"limit must be a non-negative integer: {q['limit']!r}") from None
        media_only = _parse_bool(q["media_only"], "media_only") if "media_only" in q else False
        now = _parse_timestamp(q["now"], "now") if "now" in q else corpus_now()

        flt = QueryFilter(
            bbox=bbox,
            time_from=time_from,
            time_to=time_to,
            layer=layer,
            min_precision=min_precision,
            only_with_media=media_only,
        )
        try:
            items = store.query(flt)
        except QueryError as exc:
            raise ApiError(400, "bad_query", str(exc)) from None
        scored = ranked_items(items, now)
        if limit is not None:
            scored = scored[:limit]
        collection = {
            "type": "FeatureCollection",
            "features": [build_feature(item.post, item.geo, score) for item, score in scored],
        }
        return _json_response(collection, media_type=GEOJSON_MEDIA_TYPE)

    def lookup_item(post_id_raw: str) -> StoredItem:
        try:
            post_id = int(post_id_raw)
        except ValueError:
            raise ApiError(400, "bad_id", f"post id must be numeric: {post_id_raw!r}") from None
        item = store.get(post_id)
        if item is None:
            raise ApiError(404, "not_found", f"no post with id {post_id}")
        return item

    @app.get("/api/posts/{post_id}")
    async def get_post_detail(post_id: str, request: Request) -> Response:
        item = lookup_item(post_id)
        q = request.query_params
        now = _parse_timestamp(q["now"], "now") if "now" in q else corpus_now()
        score = rank_score(item.geo, item.post, state.get(), now)
        feature = build_feature(item.post, item.geo, score, with_evidence=True)
        return _json_response(feature, media_type=GEOJSON_MEDIA_TYPE)

    @app.post("/api/posts/{post_id}/validate")
    async def validate_post(post_id: str, request: Request) -> Response:
        item = lookup_item(post_id)
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            raise ApiError(400, "bad_body", "body must be JSON") from None
        if not isinstance(body, dict) or not isinstance(body.get("validated"), bool):
            raise ApiError(400, "bad_body", 'body must be {"validated": true|false}')
        geo = item.geo
        if geo.crowd_validated != body["validated"]:
            geo = dataclasses.replace(geo, crowd_validated=body["validated"])
            store.insert(StoredItem(post=item.post, geo=geo, inserted_at=int(time.time())))
        now = corpus_now()
        score = rank_score(geo, item.post, state.get(), now)
        feature = build_feature(item.post, geo, score)
        return _json_response(feature, media_type=GEOJSON_MEDIA_TYPE)

    @app.get("/api/ranking")
    async def get_ranking() -> Response:
        return _json_response(state.get().to_dict())

    @app.put("/api/ranking")
    async def put_ranking(request: Request) -> Response:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            raise ApiError(400, "bad_body", "body must be JSON") from None
        if not isinstance(body, dict):
            raise ApiError(400, "bad_body", "body must be an object")
        try:
            params = RankingParams.from_dict(body)
        except RankingParamsError as exc:
            raise ApiError(400, "bad_params", str(exc)) from None
        state.put(params)
        return _json_response(params.to_dict())

    @app.get("/api/stats")
    async def get_stats() -> Response:
        items = store.all_items()
        by_method = {m: 0 for m in ("native", "cime_local", "cime_global", "unresolved")}
        by_precision = {c: 0 for c in (*FINENESS, "none")}
        by_source = {s: 0 for s in ("twitter", "flickr", "youtube", "instagram")}
        validated = {"validated": 0, "unvalidated": 0}
        for item in items:
            by_method[item.geo.method] += 1
            by_precision[item.geo.precision_class or "none"] += 1
            by_source[item.post.source] += 1
            validated["validated" if item.geo.crowd_validated else "unvalidated"] += 1
        extent = store.time_extent()
        return _json_response(
            {
                "total": len(items),
                "by_method": by_method,
                "by_precision": by_precision,
                "by_source": by_source,
                "validated": validated,
                "time_extent": None
                if extent is None
                else {"from": extent[0], "to": extent[1]},
            }
        )

    return app
