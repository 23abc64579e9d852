"""Operator-tunable ordering of geolocated posts.

The score is a weighted sum of geolocation precision, confidence, an
exponentially decaying recency term, and the crowd-validation flag. Weights
are live-tunable through the API; only relative magnitudes matter for the
resulting order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .geocode import Geolocation
from .ingest import Post

# Precision term by geolocation outcome; native geotags count as exact.
PRECISION_TERM = {
    "poi": 1.0,
    "street": 0.8,
    "locality": 0.5,
    "region": 0.2,
}


class RankingParamsError(ValueError):
    pass


@dataclass(frozen=True)
class RankingParams:
    w_precision: float = 0.4
    w_confidence: float = 0.3
    w_recency: float = 0.2
    w_validated: float = 0.1
    recency_halflife_s: float = 21_600.0

    def validate(self) -> None:
        weights = (self.w_precision, self.w_confidence, self.w_recency, self.w_validated)
        if any(w < 0 for w in weights):
            raise RankingParamsError("weights must be non-negative")
        if not any(w > 0 for w in weights):
            raise RankingParamsError("at least one weight must be positive")
        if self.recency_halflife_s <= 0:
            raise RankingParamsError("halflife must be positive")

    def to_dict(self) -> dict:
        return {
            "w_precision": self.w_precision,
            "w_confidence": self.w_confidence,
            "w_recency": self.w_recency,
            "w_validated": self.w_validated,
            "recency_halflife_s": self.recency_halflife_s,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RankingParams":
        known = {f: raw[f] for f in cls.__dataclass_fields__ if f in raw}
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise RankingParamsError(f"unknown ranking fields: {sorted(unknown)}")
        try:
            params = cls(**{k: float(v) for k, v in known.items()})
        except (TypeError, ValueError):
            raise RankingParamsError("ranking fields must be numbers") from None
        params.validate()
        return params


def precision_term(geo: Geolocation) -> float:
    if geo.method == "native":
        return 1.0
    if geo.method == "unresolved":
        return 0.0
    return PRECISION_TERM[geo.precision_class]


def rank_score(geo: Geolocation, post: Post, params: RankingParams, now: float) -> float:
    """Ranking score at time `now` (epoch seconds, >= post.created_at)."""
    recency = 0.5 ** ((now - post.created_at) / params.recency_halflife_s)
    return (
        params.w_precision * precision_term(geo)
        + params.w_confidence * geo.confidence
        + params.w_recency * recency
        + params.w_validated * (1.0 if geo.crowd_validated else 0.0)
    )


def rank_posts(
    items: Iterable[tuple[Post, Geolocation]],
    params: RankingParams,
    now: float,
    k: int | None = None,
) -> list[tuple[Post, Geolocation]]:
    """Items ordered by descending score, ties ascending by post_id."""
    scored = [(rank_score(geo, post, params, now), post, geo) for post, geo in items]
    scored.sort(key=lambda row: (-row[0], row[1].post_id))
    ordered = [(post, geo) for _, post, geo in scored]
    return ordered if k is None else ordered[:k]
