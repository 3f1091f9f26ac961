"""Fetch and cache corpus documents, or load them from a local directory.

Wire protocol: ``GET {base_url}/index.json`` returns ``{"corpus_id": ...,
"maps": [map_id, ...]}``; each map then lives at ``{base_url}/{map_id}.json``
and is stored verbatim.  The on-disk cache is one ``<corpus_id>/<map_id>.json``
file per map plus a ``manifest.tsv`` of ``map_id<TAB>sha256`` records; the
snapshot digest is the SHA-256 of that manifest's bytes, so any change to
any document changes the corpus digest.

Fetching is sequential and politely rate-limited; a corpus with a manifest
on disk is served entirely from cache with zero network requests.
"""

from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable
from urllib.parse import urlparse

import requests

from .errors import CacheCorrupt, MalformedJson, NetworkError, SchemaViolation
from .util import atomic_write_bytes

MANIFEST_NAME = "manifest.tsv"
_SAFE_MAP_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass(frozen=True)
class CorpusRef:
    corpus_id: str
    base_url: str

    def __post_init__(self):
        if not self.corpus_id:
            raise ValueError("corpus_id must be non-empty")
        scheme = urlparse(self.base_url).scheme
        if scheme not in ("http", "https"):
            raise ValueError(f"base_url must be an absolute HTTP(S) URL, got {self.base_url!r}")


@dataclass(frozen=True)
class CorpusSnapshot:
    corpus_id: str
    maps: tuple[tuple[str, bytes], ...]  # (map_id, raw document bytes), id-sorted
    content_digest: str
    retrieved_at: str = field(default="", compare=False)

    def map_ids(self) -> list[str]:
        return [map_id for map_id, _ in self.maps]


def _sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def manifest_content(maps: list[tuple[str, bytes]]) -> str:
    lines = [f"{map_id}\t{_sha256_hex(data)}\n" for map_id, data in sorted(maps)]
    return "".join(lines)


def compute_digest(maps: list[tuple[str, bytes]]) -> str:
    return _sha256_hex(manifest_content(maps).encode("utf-8"))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _make_snapshot(corpus_id: str, maps: list[tuple[str, bytes]]) -> CorpusSnapshot:
    ordered = tuple(sorted(maps))
    ids = [m for m, _ in ordered]
    if len(set(ids)) != len(ids):
        raise SchemaViolation(corpus_id, "listing", "duplicate map ids")
    return CorpusSnapshot(
        corpus_id=corpus_id,
        maps=ordered,
        content_digest=compute_digest(list(ordered)),
        retrieved_at=_now(),
    )


def load_local(dir: str | Path, corpus_id: str) -> CorpusSnapshot:
    """Build a snapshot from a directory holding one JSON file per map.

    Each file is checked for JSON well-formedness; MalformedJson names the
    offending file.  The digest is computed exactly as for fetched corpora.
    """
    dir = Path(dir)
    maps: list[tuple[str, bytes]] = []
    for path in sorted(dir.glob("*.json")):
        data = path.read_bytes()
        try:
            json.loads(data.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedJson(path.name, str(exc)) from exc
        maps.append((path.name[: -len(".json")], data))
    return _make_snapshot(corpus_id, maps)


def _default_fetcher(url: str, timeout: float) -> bytes:
    try:
        resp = requests.get(url, timeout=timeout)
    except requests.RequestException as exc:
        raise NetworkError(url, None, str(exc)) from exc
    if resp.status_code != 200:
        retryable = resp.status_code == 429 or resp.status_code >= 500
        raise NetworkError(url, resp.status_code, "unexpected status", retryable=retryable)
    return resp.content


def load_cached(cache_dir: str | Path, corpus_id: str) -> CorpusSnapshot:
    """Snapshot from a complete cache entry, verifying every file digest."""
    corpus_dir = Path(cache_dir) / corpus_id
    manifest = (corpus_dir / MANIFEST_NAME).read_text(encoding="utf-8")
    maps: list[tuple[str, bytes]] = []
    for line in manifest.splitlines():
        map_id, _, expected = line.partition("\t")
        path = corpus_dir / f"{map_id}.json"
        if not path.exists():
            raise CacheCorrupt(str(path), expected, "absent")
        data = path.read_bytes()
        actual = _sha256_hex(data)
        if actual != expected:
            raise CacheCorrupt(str(path), expected, actual)
        maps.append((map_id, data))
    return _make_snapshot(corpus_id, maps)


def fetch_corpus(
    ref: CorpusRef,
    cache_dir: str | Path,
    delay_seconds: float = 0.5,
    fetcher: Callable[[str], bytes] | None = None,
    timeout: float = 30.0,
) -> CorpusSnapshot:
    """Fetch all maps of a corpus, reusing the on-disk cache when possible.

    A complete cache (manifest present) is served without touching the
    network; otherwise only maps missing from the cache are requested,
    sequentially, sleeping `delay_seconds` between requests.  Map files are
    written atomically and the manifest last, so an interrupted fetch never
    leaves a partially-written entry.
    """
    get = fetcher if fetcher is not None else (lambda url: _default_fetcher(url, timeout))
    corpus_dir = Path(cache_dir) / ref.corpus_id
    if (corpus_dir / MANIFEST_NAME).exists():
        return load_cached(cache_dir, ref.corpus_id)

    base = ref.base_url.rstrip("/")
    listing_raw = get(f"{base}/index.json")
    made_request = True
    try:
        listing = json.loads(listing_raw.decode("utf-8"))
        map_ids = [str(m) for m in listing["maps"]]
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError) as exc:
        raise SchemaViolation(ref.corpus_id, "index.json", f"bad corpus listing: {exc}") from exc

    maps: list[tuple[str, bytes]] = []
    for map_id in sorted(map_ids):
        if not _SAFE_MAP_ID.match(map_id):
            raise SchemaViolation(ref.corpus_id, "index.json", f"unsafe map id {map_id!r}")
        path = corpus_dir / f"{map_id}.json"
        if path.exists():
            data = path.read_bytes()
        else:
            if made_request and delay_seconds > 0:
                time.sleep(delay_seconds)
            data = get(f"{base}/{map_id}.json")
            made_request = True
            atomic_write_bytes(path, data)
        maps.append((map_id, data))

    snapshot = _make_snapshot(ref.corpus_id, maps)
    atomic_write_bytes(corpus_dir / MANIFEST_NAME, manifest_content(list(snapshot.maps)).encode("utf-8"))
    return snapshot
