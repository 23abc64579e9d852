"""Flat key=value config files: one `key = value` pair per line, `#` comments."""

from __future__ import annotations

from pathlib import Path


class ConfigError(ValueError):
    pass


def read_kv_file(path: str | Path) -> dict[str, str]:
    """Parse a flat key=value file into a string dict.

    Blank lines and lines starting with '#' are ignored. Raises ConfigError
    on lines without '=' or with empty keys, naming the line number.
    """
    out: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key] = value.strip()
    return out
