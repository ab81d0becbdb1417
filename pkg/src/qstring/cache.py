"""Content-addressed on-disk cache of series in their canonical text form."""

from __future__ import annotations

import hashlib
import os
import tempfile
import warnings
from pathlib import Path
from typing import Callable, Optional

from .series import ScaledSeries

CACHE_VERSION = 1
ENV_VAR = "QSTRING_CACHE_DIR"
_HEADER = "qstring-series-cache"


class SeriesCache:
    """Entries live at ``<root>/v<version>/<hash[:2]>/<hash>``.

    The hash covers the version and the expression key, and each file repeats
    both in a header so a stale or foreign entry is never served.
    """

    def __init__(self, root, version: int = CACHE_VERSION):
        self.root = Path(root)
        self.version = version

    def _digest(self, key: str) -> str:
        return hashlib.sha256(f"v{self.version}\n{key}".encode()).hexdigest()

    def path(self, key: str) -> Path:
        h = self._digest(key)
        return self.root / f"v{self.version}" / h[:2] / h

    def get(self, key: str) -> Optional[ScaledSeries]:
        path = self.path(key)
        try:
            text = path.read_text()
        except FileNotFoundError:
            return None
        head, _, body = text.partition("\n\n")
        expected = f"{_HEADER} v{self.version}\nkey={key}"
        if head != expected:
            return None
        body = body.strip()
        try:
            series = ScaledSeries.from_text(body)
        except (ValueError, ZeroDivisionError):
            series = None
        if series is None or series.to_text() != body:
            warnings.warn(f"corrupt cache entry {path}; recomputing", RuntimeWarning)
            return None
        return series

    def put(self, key: str, series: ScaledSeries) -> Path:
        path = self.path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = f"{_HEADER} v{self.version}\nkey={key}\n\n{series.to_text()}\n"
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def get_or_compute(self, key: str, compute: Callable[[], ScaledSeries]) -> ScaledSeries:
        hit = self.get(key)
        if hit is not None:
            return hit
        value = compute()
        self.put(key, value)
        return value


_active: Optional[SeriesCache] = None


def configure(root=None) -> Optional[SeriesCache]:
    """Activate a cache at ``root``, falling back to the environment variable."""
    global _active
    root = root or os.environ.get(ENV_VAR)
    _active = SeriesCache(root) if root else None
    return _active


def active() -> Optional[SeriesCache]:
    return _active


def cached(key: str, compute: Callable[[], ScaledSeries]) -> ScaledSeries:
    """Use the active cache if one is configured, else just compute."""
    if _active is None:
        return compute()
    return _active.get_or_compute(key, compute)
