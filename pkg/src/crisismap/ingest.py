"""Post ingestion: parse newline-delimited post records, extract hashtags,
mentions and links, and resolve platform-linked media through a pluggable
client. Parsing is skip-and-report: malformed records are collected with
their line numbers and never abort the batch.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Protocol
from urllib.parse import urlparse

from .geo import valid_lat, valid_lon

SOURCES = ("twitter", "flickr", "youtube", "instagram")
MEDIA_KINDS = ("image", "video")
LINKED_PLATFORMS = ("flickr", "youtube", "instagram")

# Host suffixes that identify resolvable platform links.
PLATFORM_HOSTS: dict[str, str] = {
    "flickr.com": "flickr",
    "flic.kr": "flickr",
    "youtube.com": "youtube",
    "youtu.be": "youtube",
    "instagram.com": "instagram",
    "instagr.am": "instagram",
}

_HASHTAG_RE = re.compile(r"#([A-Za-z0-9_]+)")
_MENTION_RE = re.compile(r"@([A-Za-z0-9_]+)")
_LINK_RE = re.compile(r"https?://[^\s]+")
_LINK_TRAILING = ".,;!?)"


class PostParseError(ValueError):
    pass


@dataclass(frozen=True)
class MediaItem:
    url: str
    kind: str  # image | video
    origin: str = "embedded"  # embedded | linked_platform
    platform: str | None = None  # required iff origin == linked_platform
    image_tags: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.kind not in MEDIA_KINDS:
            raise PostParseError(f"media kind must be image|video, got {self.kind!r}")
        if self.origin == "linked_platform":
            if self.platform not in LINKED_PLATFORMS:
                raise PostParseError("linked_platform media needs a platform")
        elif self.origin == "embedded":
            if self.platform is not None:
                raise PostParseError("embedded media must not carry a platform")
        else:
            raise PostParseError(f"unknown media origin {self.origin!r}")


@dataclass(frozen=True)
class Post:
    post_id: int
    source: str
    author_id: str
    created_at: int  # UTC epoch seconds
    text: str
    hashtags: tuple[str, ...] = ()  # lowercase, no '#'
    mentions: tuple[str, ...] = ()  # case preserved, no '@'
    retweet_of: int | None = None
    reply_to: int | None = None
    native_geotag: tuple[float, float] | None = None  # (lat, lon)
    links: tuple[str, ...] = ()
    media: tuple[MediaItem, ...] = ()

    def validate(self) -> None:
        if self.post_id < 0:
            raise PostParseError("id must be an unsigned integer")
        if self.source not in SOURCES:
            raise PostParseError(f"source must be one of {'|'.join(SOURCES)}, got {self.source!r}")
        if self.created_at <= 0:
            raise PostParseError("created_at must be positive")
        if self.native_geotag is not None:
            lat, lon = self.native_geotag
            if not (valid_lat(lat) and valid_lon(lon)):
                raise PostParseError(f"geo out of range: {self.native_geotag}")
        for tag in self.hashtags:
            if not tag or any(c.isspace() for c in tag) or "#" in tag:
                raise PostParseError(f"bad hashtag {tag!r}")
        for name in self.mentions:
            if not name or any(c.isspace() for c in name) or "@" in name:
                raise PostParseError(f"bad mention {name!r}")
        for item in self.media:
            item.validate()


def extract_entities(text: str) -> tuple[list[str], list[str], list[str]]:
    """(hashtags, mentions, links) pulled from raw text.

    Hashtags are lowercased and deduplicated; mentions keep their case;
    links are maximal http(s) runs with terminal punctuation stripped.
    """
    hashtags = _dedup(m.group(1).lower() for m in _HASHTAG_RE.finditer(text))
    mentions = _dedup(m.group(1) for m in _MENTION_RE.finditer(text))
    links = []
    for m in _LINK_RE.finditer(text):
        url = m.group(0).rstrip(_LINK_TRAILING)
        if url:
            links.append(url)
    return hashtags, mentions, _dedup(links)


def _dedup(items: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def _parse_created_at(value) -> int:
    if isinstance(value, bool):
        raise PostParseError("created_at must be a timestamp")
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            raise PostParseError(f"created_at not ISO-8601: {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise PostParseError(f"created_at has unsupported type {type(value).__name__}")


def _parse_media_obj(obj: dict) -> MediaItem:
    if not isinstance(obj, dict) or "url" not in obj or "kind" not in obj:
        raise PostParseError(f"media item needs url and kind: {obj!r}")
    item = MediaItem(
        url=str(obj["url"]),
        kind=str(obj["kind"]),
        origin=str(obj.get("origin", "embedded")),
        platform=obj.get("platform"),
        image_tags=tuple(str(t) for t in obj.get("image_tags", [])),
    )
    item.validate()
    return item


def parse_post_record(record: str | dict) -> Post:
    """Parse one input record (JSON text or already-decoded object)."""
    if isinstance(record, str):
        try:
            obj = json.loads(record)
        except json.JSONDecodeError as exc:
            raise PostParseError(f"invalid JSON: {exc}") from None
    else:
        obj = record
    if not isinstance(obj, dict):
        raise PostParseError("record is not an object")
    for key in ("id", "source", "author", "created_at", "text"):
        if key not in obj:
            raise PostParseError(f"missing field {key!r}")
    try:
        post_id = int(obj["id"])
    except (TypeError, ValueError):
        raise PostParseError(f"id is not an integer: {obj['id']!r}") from None

    text = str(obj["text"])
    ext_tags, ext_mentions, ext_links = extract_entities(text)
    hashtags = (
        _dedup(str(t).lstrip("#").lower() for t in obj["hashtags"])
        if "hashtags" in obj
        else ext_tags
    )
    mentions = (
        _dedup(str(m).lstrip("@") for m in obj["mentions"]) if "mentions" in obj else ext_mentions
    )
    links = _dedup(str(u) for u in obj["links"]) if "links" in obj else ext_links

    geotag = None
    if obj.get("geo") is not None:
        geo = obj["geo"]
        if not (isinstance(geo, (list, tuple)) and len(geo) == 2):
            raise PostParseError(f"geo must be [lat, lon]: {geo!r}")
        geotag = (float(geo[0]), float(geo[1]))

    media = tuple(_parse_media_obj(m) for m in obj.get("media", []))

    def opt_int(key: str) -> int | None:
        if obj.get(key) is None:
            return None
        try:
            return int(obj[key])
        except (TypeError, ValueError):
            raise PostParseError(f"{key} is not an integer: {obj[key]!r}") from None

    post = Post(
        post_id=post_id,
        source=str(obj["source"]),
        author_id=str(obj["author"]),
        created_at=_parse_created_at(obj["created_at"]),
        text=text,
        hashtags=tuple(hashtags),
        mentions=tuple(mentions),
        retweet_of=opt_int("retweet_of"),
        reply_to=opt_int("reply_to"),
        native_geotag=geotag,
        links=tuple(links),
        media=media,
    )
    post.validate()
    return post


def post_to_record(post: Post) -> dict:
    """Canonical serialized form; parse_post_record inverts it exactly."""
    rec: dict = {
        "id": post.post_id,
        "source": post.source,
        "author": post.author_id,
        "created_at": post.created_at,
        "text": post.text,
        "hashtags": list(post.hashtags),
        "mentions": list(post.mentions),
        "links": list(post.links),
    }
    if post.native_geotag is not None:
        rec["geo"] = [post.native_geotag[0], post.native_geotag[1]]
    if post.retweet_of is not None:
        rec["retweet_of"] = post.retweet_of
    if post.reply_to is not None:
        rec["reply_to"] = post.reply_to
    if post.media:
        rec["media"] = [
            {
                "url": m.url,
                "kind": m.kind,
                "origin": m.origin,
                **({"platform": m.platform} if m.platform is not None else {}),
                "image_tags": list(m.image_tags),
            }
            for m in post.media
        ]
    return rec


@dataclass
class ParseReport:
    """Line-numbered errors collected while a batch parse kept going."""

    errors: list[tuple[int, str]] = field(default_factory=list)
    media_failures: list[tuple[int, str]] = field(default_factory=list)  # (post_id, url)

    def record(self, lineno: int, message: str) -> None:
        self.errors.append((lineno, message))


def parse_posts(path: str | Path, report: ParseReport | None = None) -> list[Post]:
    """Parse an NDJSON post file, skipping (and reporting) bad records.

    Duplicate post_ids are reported as errors; the first occurrence wins.
    """
    report = report if report is not None else ParseReport()
    posts: list[Post] = []
    seen: set[int] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                post = parse_post_record(line)
            except PostParseError as exc:
                report.record(lineno, str(exc))
                continue
            if post.post_id in seen:
                report.record(lineno, f"duplicate post id {post.post_id}")
                continue
            seen.add(post.post_id)
            posts.append(post)
    return posts


def write_posts(path: str | Path, posts: Iterable[Post]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for post in posts:
            fh.write(json.dumps(post_to_record(post), ensure_ascii=False))
            fh.write("\n")


class PlatformClientError(RuntimeError):
    """Transport-level failure talking to a platform; the batch never aborts."""


class PlatformClient(Protocol):
    def fetch_media(self, url: str) -> list[MediaItem]:
        """Media behind a platform URL; [] when not resolvable."""
        ...


def platform_for_url(url: str) -> str | None:
    host = (urlparse(url).hostname or "").lower()
    for suffix, platform in PLATFORM_HOSTS.items():
        if host == suffix or host.endswith("." + suffix):
            return platform
    return None


def url_fixture_name(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest() + ".json"


class FixturePlatformClient:
    """Resolves platform URLs from a local fixture directory.

    Each fixture file is named by the sha256 hex of the URL plus ``.json``
    and contains a JSON array of media objects ({url, kind, image_tags}).
    A missing file means "not resolvable"; an unreadable file is treated as
    a transport failure.
    """

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)

    def fetch_media(self, url: str) -> list[MediaItem]:
        path = self.fixture_dir / url_fixture_name(url)
        if not path.exists():
            return []
        try:
            entries = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise PlatformClientError(f"fixture for {url} unreadable: {exc}") from None
        platform = platform_for_url(url)
        items = []
        for entry in entries:
            items.append(
                MediaItem(
                    url=str(entry["url"]),
                    kind=str(entry["kind"]),
                    origin="linked_platform",
                    platform=platform,
                    image_tags=tuple(str(t) for t in entry.get("image_tags", [])),
                )
            )
        return items


def resolve_linked_media(
    post: Post, client: PlatformClient, report: ParseReport | None = None
) -> Post:
    """Append media found behind the post's platform links.

    Existing media are never touched; duplicates (by url) are not added, so
    the operation is idempotent. Client failures leave the post unchanged
    and are recorded on the report.
    """
    new_items: list[MediaItem] = []
    known_urls = {m.url for m in post.media}
    for url in post.links:
        platform = platform_for_url(url)
        if platform is None:
            continue
        try:
            fetched = client.fetch_media(url)
        except PlatformClientError as exc:
            if report is not None:
                report.media_failures.append((post.post_id, f"{url}: {exc}"))
            continue
        for item in fetched:
            resolved = replace(item, origin="linked_platform", platform=platform)
            if resolved.url not in known_urls:
                known_urls.add(resolved.url)
                new_items.append(resolved)
    if not new_items:
        return post
    return replace(post, media=post.media + tuple(new_items))
