"""Content-addressed on-disk cache for closures and automorphism lists.

Entries are ``<sha256>.npy`` with a sidecar ``.sha256`` holding the digest
of the payload bytes; a mismatch counts as a miss and the entry is rebuilt.
"""

from __future__ import annotations

import hashlib
import io
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

log = logging.getLogger("twistlab.cache")


class ArrayCache:
    def __init__(self, root, namespace: str = ""):
        self.root = Path(root)
        self.namespace = namespace
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        h = hashlib.sha256((self.namespace + "\0" + key).encode()).hexdigest()
        return self.root / h[:2] / h

    def load(self, key: str):
        p = self._path(key)
        data_p, sum_p = p.with_suffix(".npy"), p.with_suffix(".sha256")
        try:
            raw = data_p.read_bytes()
            want = sum_p.read_text().strip()
        except OSError:
            self.misses += 1
            return None
        if hashlib.sha256(raw).hexdigest() != want:
            log.warning("cache entry %s is corrupt; recomputing", data_p.name)
            self.misses += 1
            return None
        try:
            arr = np.load(io.BytesIO(raw), allow_pickle=False)
        except ValueError:
            self.misses += 1
            return None
        self.hits += 1
        log.info("cache hit %s", data_p.name[:12])
        return arr

    def store(self, key: str, arr: np.ndarray) -> None:
        p = self._path(key)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            buf = io.BytesIO()
            np.save(buf, np.asarray(arr), allow_pickle=False)
            raw = buf.getvalue()
            for path, payload in ((p.with_suffix(".npy"), raw),
                                  (p.with_suffix(".sha256"), hashlib.sha256(raw).hexdigest().encode())):
                fd, tmp = tempfile.mkstemp(dir=p.parent)
                with os.fdopen(fd, "wb") as fh:
                    fh.write(payload)
                os.replace(tmp, path)
        except OSError as exc:
            log.warning("cannot write cache entry: %s", exc)
