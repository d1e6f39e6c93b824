"""HTTP coefficient client with an on-disk, checksummed cache.

Responses are JSON arrays of decimal strings [a(1), a(2), ...]. They are
rewritten in the local ``kind=ap`` file format before caching, so cache
entries look the same whatever served them.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import threading
from pathlib import Path

import requests

from .coeffs import (FormDescriptor, PrimeCoefficientTable, parse_coefficient_file, require_valid,
                     serialize_table)
from .errors import CacheCorruptionError, FormatError, InsufficientDataError, NetworkError
from .primes import sieve_primes

log = logging.getLogger(__name__)

ENV_API_BASE = "EIGENCOPRIME_API_BASE"
ENV_CACHE = "EIGENCOPRIME_CACHE"
DEFAULT_CACHE = "./cache"
DEFAULT_TIMEOUT = 30.0

_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


def _entry_lock(key: str) -> threading.Lock:
    with _locks_guard:
        return _locks.setdefault(key, threading.Lock())


def label_metadata(label: str) -> tuple[int, int]:
    """(level, weight) from an LMFDB-style label such as ``11.6.a.a``."""
    m = re.match(r"^(\d+)\.(\d+)\.", label)
    if not m:
        raise FormatError(f"cannot read level and weight from label {label!r}; pass them explicitly")
    return int(m.group(1)), int(m.group(2))


def expand_endpoint(template: str, label: str, bound: int) -> str:
    if "{label}" not in template:
        template = template.rstrip("/") + "/{label}?bound={bound}"
    return template.replace("{label}", label).replace("{bound}", str(bound))


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", label)


class CoefficientCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root or os.environ.get(ENV_CACHE) or DEFAULT_CACHE)

    def path(self, label: str) -> Path:
        return self.root / f"{_safe_name(label)}.ap"

    def _digest_path(self, label: str) -> Path:
        return self.root / f"{_safe_name(label)}.ap.sha256"

    def get(self, label: str, bound: int) -> PrimeCoefficientTable | None:
        """Cached table restricted to ``bound``, or None if absent or too short."""
        path = self.path(label)
        if not path.exists():
            return None
        data = path.read_bytes()
        digest = self._digest_path(label)
        if not digest.exists() or digest.read_text().strip() != hashlib.sha256(data).hexdigest():
            raise CacheCorruptionError(f"cache entry {path} fails its checksum")
        table = parse_coefficient_file(data, source="remote")
        if table.bound < bound:
            return None
        return table.restrict(bound) if table.bound > bound else table

    def put(self, table: PrimeCoefficientTable) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        label = table.descriptor.label
        data = serialize_table(table).encode("utf-8")
        with _entry_lock(str(self.path(label))):
            self._atomic_write(self.path(label), data)
            self._atomic_write(self._digest_path(label), (hashlib.sha256(data).hexdigest() + "\n").encode())
        return self.path(label)

    def _atomic_write(self, path: Path, data: bytes) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _get(url: str, timeout: float) -> list:
    last: Exception | None = None
    for attempt in (1, 2):
        try:
            resp = requests.get(url, timeout=timeout)
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            last = exc
            log.warning("GET %s failed (attempt %d): %s", url, attempt, exc)
    raise NetworkError(f"could not fetch {url}: {last}")


def table_from_response(payload, label: str, level: int, weight: int, bound: int) -> PrimeCoefficientTable:
    if not isinstance(payload, list):
        raise FormatError("coefficient response must be a JSON array")
    if len(payload) < bound:
        raise InsufficientDataError(f"{label}: source provides {len(payload)} coefficients, need {bound}")
    try:
        values = [int(str(v).replace("−", "-")) for v in payload[:bound]]
    except ValueError as exc:
        raise FormatError(f"{label}: non-integer coefficient in response ({exc})") from None
    if values[0] != 1:
        raise FormatError(f"{label}: response does not start with a(1) = 1")
    desc = FormDescriptor(label, level, weight, "remote")
    table = PrimeCoefficientTable(desc, bound, {p: values[p - 1] for p in sieve_primes(bound)})
    require_valid(table)
    return table


def fetch_remote(label: str, bound: int, endpoint: str | None = None, *,
                 cache_dir: str | os.PathLike | None = None, offline: bool = False,
                 level: int | None = None, weight: int | None = None,
                 timeout: float = DEFAULT_TIMEOUT) -> PrimeCoefficientTable:
    """Cached table of a(p), p <= bound, for ``label``; hits the network only on a cache miss."""
    cache = CoefficientCache(cache_dir)
    with _entry_lock(f"fetch:{cache.path(label)}"):
        hit = cache.get(label, bound)
        if hit is not None:
            return hit
        if offline:
            raise InsufficientDataError(f"{label} (bound {bound}) is not cached and offline mode is on")
        endpoint = endpoint or os.environ.get(ENV_API_BASE)
        if not endpoint:
            raise NetworkError(f"no API endpoint configured (set --api-base or {ENV_API_BASE})")
        if level is None or weight is None:
            level, weight = label_metadata(label)
        payload = _get(expand_endpoint(endpoint, label, bound), timeout)
        table = table_from_response(payload, label, level, weight, bound)
        cache.put(table)
        return cache.get(label, bound)


def dump_json_payload(table, upto: int | None = None) -> str:
    """The wire format for a full table: JSON array of decimal strings a(1..B)."""
    from .coeffs import coefficients_upto
    B = upto or table.bound
    return json.dumps([str(a) for a in coefficients_upto(table, B)[1:]])
