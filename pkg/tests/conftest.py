from __future__ import annotations

import pytest

from crisismap.gazetteer import Gazetteer, Place
from crisismap.ingest import Post

BASE_TIME = 1_391_600_000  # 2014-02-05T11:33:20Z

# (criterion, passed, detail) rows appended by the acceptance suite and
# echoed as one line each at the end of the pytest run.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}{suffix}")


def make_place(
    place_id: int,
    name: str,
    lat: float,
    lon: float,
    place_class: str = "locality",
    importance: float = 0.5,
    alt_names: tuple[str, ...] = (),
    admin_parents: tuple[int, ...] = (),
    pad: float = 0.05,
) -> Place:
    return Place(
        place_id=place_id,
        canonical_name=name,
        alt_names=alt_names,
        place_class=place_class,
        centroid=(lat, lon),
        bbox=(lon - pad, lat - pad, lon + pad, lat + pad),
        admin_parents=admin_parents,
        importance=importance,
    )


DAWLISH = make_place(1001, "Dawlish", 50.5833, -3.4656, importance=0.6, alt_names=("Devon seaside town",))
EXETER_UK = make_place(1002, "Exeter", 50.7236, -3.5275, importance=0.8)
EXETER_US = make_place(1003, "Exeter", 42.9814, -70.9478, importance=0.3)


@pytest.fixture
def toy_places() -> list[Place]:
    return [DAWLISH, EXETER_UK, EXETER_US]


@pytest.fixture
def toy_gazetteer(toy_places) -> Gazetteer:
    return Gazetteer(toy_places)


def tsv_row(p: Place) -> str:
    return "\t".join(
        [
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
        ]
    )


TSV_HEADER = (
    "place_id\tcanonical_name\talt_names\tclass\tlat\tlon\tmin_lon\tmin_lat"
    "\tmax_lon\tmax_lat\tadmin_parents\timportance"
)


def write_tsv(path, places: list[Place]) -> None:
    lines = [TSV_HEADER] + [tsv_row(p) for p in places]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_post(post_id: int, text: str = "", **kwargs) -> Post:
    defaults = dict(
        post_id=post_id,
        source="twitter",
        author_id=f"u{post_id}",
        created_at=BASE_TIME,
        text=text,
    )
    defaults.update(kwargs)
    return Post(**defaults)
