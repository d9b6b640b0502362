"""On-disk result cache.

One file per result: a first line ``sha256 <hex digest of the body>``
followed by the JSON body. A file whose digest does not match is deleted
and treated as a miss.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from filelock import FileLock

log = logging.getLogger(__name__)


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "wdist"


class ResultCache:
    def __init__(self, directory, enabled: bool = True):
        self.directory = Path(directory)
        self.enabled = enabled

    @staticmethod
    def key(**fields) -> str:
        blob = json.dumps(fields, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:32]

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str) -> dict | None:
        if not self.enabled:
            return None
        path = self.path(key)
        if not path.exists():
            return None
        with FileLock(str(path) + ".lock"):
            try:
                header, body = path.read_text().split("\n", 1)
                digest = header.split(" ", 1)[1]
            except (OSError, ValueError, IndexError):
                digest, body = None, ""
            if digest != hashlib.sha256(body.encode()).hexdigest():
                log.warning("cache entry %s is corrupt; discarding it", path.name)
                path.unlink(missing_ok=True)
                return None
            return json.loads(body)

    def store(self, key: str, payload: dict) -> None:
        if not self.enabled:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(key)
        body = json.dumps(payload)
        text = f"sha256 {hashlib.sha256(body.encode()).hexdigest()}\n{body}"
        with FileLock(str(path) + ".lock"):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(text)
            tmp.replace(path)
