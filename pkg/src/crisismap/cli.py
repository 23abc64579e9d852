"""Command-line pipeline driver.

Subcommands compose the library modules end to end: build a gazetteer
index, ingest posts, geolocate them, load a store, serve the HTTP API,
generate synthetic scenarios, and evaluate against ground truth. Exit
codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .evaluate import AlignmentError, evaluate, format_report, write_report
from .gazetteer import GazetteerError, load_any, load_gazetteer, write_gazetteer_tsv
from .geocode import (
    GeocodeConfig,
    geolocate_corpus,
    read_geolocations,
    write_geolocations,
)
from .ingest import FixturePlatformClient, ParseReport, parse_posts, resolve_linked_media, write_posts
from .kvconfig import ConfigError
from .simulate import (
    ScenarioConfig,
    ScenarioError,
    generate_scenario,
    synthesize_gazetteer,
    write_truth,
    read_truth,
)
from .store import Store, StoredItem

INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    GazetteerError,
    ConfigError,
    ScenarioError,
    AlignmentError,
)


class CliInputError(RuntimeError):
    pass


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliInputError(f"{what} not found: {path}")
    return p


def cmd_gazetteer_build(args: argparse.Namespace) -> int:
    src = _require_file(args.infile, "gazetteer TSV")
    g = load_gazetteer(src)
    g.save_index(args.out)
    print(f"indexed {len(g)} places -> {args.out}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    src = _require_file(args.posts, "posts file")
    report = ParseReport()
    posts = parse_posts(src, report)
    if not posts and report.errors:
        for lineno, message in report.errors:
            print(f"line {lineno}: {message}", file=sys.stderr)
        raise CliInputError("all records malformed")
    if args.fixtures:
        client = FixturePlatformClient(args.fixtures)
        posts = [resolve_linked_media(p, client, report) for p in posts]
    write_posts(args.out, posts)
    for lineno, message in report.errors:
        print(f"skipped line {lineno}: {message}", file=sys.stderr)
    for post_id, failure in report.media_failures:
        print(f"media fetch failed for post {post_id}: {failure}", file=sys.stderr)
    print(f"ingested {len(posts)} posts ({len(report.errors)} skipped) -> {args.out}")
    return 0


def cmd_geolocate(args: argparse.Namespace) -> int:
    posts = parse_posts(_require_file(args.posts, "posts file"))
    g = load_any(_require_file(args.gazetteer, "gazetteer"))
    cfg = GeocodeConfig.from_file(_require_file(args.config, "config file")) if args.config else GeocodeConfig()
    geos = geolocate_corpus(posts, g, cfg)
    write_geolocations(args.out, geos)
    resolved = sum(1 for geo in geos if geo.method != "unresolved")
    print(f"geolocated {resolved}/{len(geos)} posts -> {args.out}")
    return 0


def cmd_store_build(args: argparse.Namespace) -> int:
    posts = parse_posts(_require_file(args.posts, "posts file"))
    geos = read_geolocations(_require_file(args.geolocations, "geolocations file"))
    by_id = {geo.post_id: geo for geo in geos}
    missing = [p.post_id for p in posts if p.post_id not in by_id]
    if missing:
        raise CliInputError(f"no geolocation for post ids: {missing[:10]}")
    with Store.open(args.out) as store:
        store.insert_many([StoredItem(post=p, geo=by_id[p.post_id]) for p in posts])
        print(f"stored {len(store)} items -> {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    directory = Path(args.store)
    if not directory.is_dir():
        raise CliInputError(f"store directory not found: {args.store}")
    import uvicorn

    from .api import create_app

    store = Store.open(directory)
    app = create_app(store, cors_origin=args.cors_origin)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = ScenarioConfig.from_file(_require_file(args.config, "scenario config"))
    g = load_any(_require_file(args.gazetteer, "gazetteer"))
    posts, truth = generate_scenario(cfg, g)
    write_posts(args.out_posts, posts)
    write_truth(args.out_truth, truth)
    n_geo = sum(1 for p in posts if p.native_geotag is not None)
    print(f"generated {len(posts)} posts ({n_geo} geotagged) -> {args.out_posts}")
    return 0


def cmd_scenario_gazetteer(args: argparse.Namespace) -> int:
    cfg = ScenarioConfig.from_file(_require_file(args.config, "scenario config"))
    places = synthesize_gazetteer(cfg)
    write_gazetteer_tsv(args.out, places)
    print(f"wrote {len(places)} synthetic places -> {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    geos = read_geolocations(_require_file(args.geolocations, "geolocations file"))
    truth = read_truth(_require_file(args.truth, "truth file"))
    posts = parse_posts(_require_file(args.posts, "posts file"))
    try:
        ks = [int(k) for k in args.k.split(",") if k]
    except ValueError:
        raise CliInputError(f"--k must be comma-separated integers: {args.k!r}") from None
    report = evaluate(geos, truth, posts, ks=ks)
    print(format_report(report))
    out = args.out or f"{args.geolocations}.report.json"
    write_report(out, report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crisismap")
    sub = parser.add_subparsers(dest="command", required=True)

    gaz = sub.add_parser("gazetteer", help="gazetteer index operations")
    gaz_sub = gaz.add_subparsers(dest="gazetteer_command", required=True)
    build = gaz_sub.add_parser("build", help="compile a TSV extract into an index")
    build.add_argument("--in", dest="infile", required=True)
    build.add_argument("--out", required=True)
    build.set_defaults(func=cmd_gazetteer_build)

    ing = sub.add_parser("ingest", help="parse posts and resolve linked media")
    ing.add_argument("--posts", required=True)
    ing.add_argument("--fixtures", help="platform media fixture directory")
    ing.add_argument("--out", required=True)
    ing.set_defaults(func=cmd_ingest)

    geo = sub.add_parser("geolocate", help="geolocate a post corpus")
    geo.add_argument("--posts", required=True)
    geo.add_argument("--gazetteer", required=True)
    geo.add_argument("--config", help="key=value geocoding config")
    geo.add_argument("--out", required=True)
    geo.set_defaults(func=cmd_geolocate)

    stb = sub.add_parser("store", help="store operations")
    stb_sub = stb.add_subparsers(dest="store_command", required=True)
    sb = stb_sub.add_parser("build", help="load posts and geolocations into a store directory")
    sb.add_argument("--posts", required=True)
    sb.add_argument("--geolocations", required=True)
    sb.add_argument("--out", required=True)
    sb.set_defaults(func=cmd_store_build)

    srv = sub.add_parser("serve", help="serve the HTTP API over a store")
    srv.add_argument("--store", required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8080)
    srv.add_argument("--cors-origin", default=None)
    srv.set_defaults(func=cmd_serve)

    sim = sub.add_parser("simulate", help="generate a synthetic scenario corpus")
    sim.add_argument("--config", required=True)
    sim.add_argument("--gazetteer", required=True)
    sim.add_argument("--out-posts", required=True)
    sim.add_argument("--out-truth", required=True)
    sim.set_defaults(func=cmd_simulate)

    sg = sub.add_parser("scenario-gazetteer", help="synthesize a gazetteer TSV for a scenario")
    sg.add_argument("--config", required=True)
    sg.add_argument("--out", required=True)
    sg.set_defaults(func=cmd_scenario_gazetteer)

    ev = sub.add_parser("evaluate", help="score geolocations against ground truth")
    ev.add_argument("--geolocations", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--posts", required=True)
    ev.add_argument("--k", default="10,50")
    ev.add_argument("--out", help="report JSON path (default: <geolocations>.report.json)")
    ev.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, *INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
