"""Scoring of geolocation output against scenario ground truth."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .geo import haversine_m
from .geocode import Geolocation
from .ingest import Post
from .ranking import RankingParams, rank_posts
from .simulate import TruthRow


class AlignmentError(ValueError):
    """Input files disagree on which post_ids they cover."""


@dataclass(frozen=True)
class EvalReport:
    resolution_rate: float | None
    within_radius_rate: float | None
    median_error_m: float | None
    precision_at_k: dict[int, float | None]

    def to_dict(self) -> dict:
        return {
            "resolution_rate": self.resolution_rate,
            "within_radius_rate": self.within_radius_rate,
            "median_error_m": self.median_error_m,
            "precision_at_k": {str(k): v for k, v in sorted(self.precision_at_k.items())},
        }


def _check_alignment(geos: Sequence[Geolocation], truth: dict[int, TruthRow], posts: Sequence[Post]) -> None:
    geo_ids = {g.post_id for g in geos}
    post_ids = {p.post_id for p in posts}
    truth_ids = set(truth)
    if geo_ids == post_ids == truth_ids:
        return
    offenders = sorted((geo_ids | post_ids | truth_ids) - (geo_ids & post_ids & truth_ids))
    shown = ", ".join(str(i) for i in offenders[:20])
    more = "" if len(offenders) <= 20 else f" (+{len(offenders) - 20} more)"
    raise AlignmentError(f"post_id mismatch across inputs: {shown}{more}")


def within_radius(geo: Geolocation, truth: TruthRow) -> bool:
    """Whether a resolved geolocation lands within its own precision-class
    radius of the ground-truth point."""
    if geo.point is None or geo.radius_m is None:
        return False
    return haversine_m(geo.point, (truth.lat, truth.lon)) <= geo.radius_m


def evaluate(
    geos: Sequence[Geolocation],
    truth: dict[int, TruthRow],
    posts: Sequence[Post],
    ks: Sequence[int] = (10, 50),
    params: RankingParams | None = None,
) -> EvalReport:
    """Resolution, within-radius accuracy, median error, and precision@k.

    precision@k ranks all posts with the given (default) ranking parameters
    at the corpus clock (max created_at) and counts within-radius hits among
    the top k.
    """
    _check_alignment(geos, truth, posts)
    params = params or RankingParams()
    posts_by_id = {p.post_id: p for p in posts}

    non_geotagged = [g for g in geos if posts_by_id[g.post_id].native_geotag is None]
    resolved = [g for g in geos if g.method != "unresolved"]

    resolution_rate = None
    if non_geotagged:
        resolution_rate = sum(1 for g in non_geotagged if g.method != "unresolved") / len(non_geotagged)

    within_radius_rate = None
    median_error_m = None
    if resolved:
        hits = [within_radius(g, truth[g.post_id]) for g in resolved]
        within_radius_rate = sum(hits) / len(resolved)
        errors = [haversine_m(g.point, (truth[g.post_id].lat, truth[g.post_id].lon)) for g in resolved]
        median_error_m = statistics.median(errors)

    now = max((p.created_at for p in posts), default=0)
    items = [(posts_by_id[g.post_id], g) for g in geos]
    precision_at_k: dict[int, float | None] = {}
    for k in ks:
        if not items:
            precision_at_k[k] = None
            continue
        top = rank_posts(items, params, now, k=k)
        hits = [g.method != "unresolved" and within_radius(g, truth[g.post_id]) for _, g in top]
        precision_at_k[k] = sum(hits) / len(top)
    return EvalReport(
        resolution_rate=resolution_rate,
        within_radius_rate=within_radius_rate,
        median_error_m=median_error_m,
        precision_at_k=precision_at_k,
    )


def write_report(path: str | Path, report: EvalReport) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")


def format_report(report: EvalReport) -> str:
    def fmt(value: float | None, pattern: str = "{:.4f}") -> str:
        return "absent" if value is None else pattern.format(value)

    lines = [
        f"resolution_rate:    {fmt(report.resolution_rate)}",
        f"within_radius_rate: {fmt(report.within_radius_rate)}",
        f"median_error_m:     {fmt(report.median_error_m, '{:.1f}')}",
    ]
    for k, value in sorted(report.precision_at_k.items()):
        lines.append(f"precision_at_{k}:{' ' * max(1, 6 - len(str(k)))}{fmt(value)}")
    return "\n".join(lines)
