"""Append-only on-disk cache of computed invariants.

One JSON object per line. Each line carries a checksum over its payload; a
line that fails to parse or verify is ignored, so damage costs a recompute
and never a wrong answer.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Dict, Optional

from filelock import FileLock

from .bundle import BundleSpec
from .invariants import LocalInvariants, TruncationPolicy

ENGINE_VERSION = "localcharge-1"
CACHE_ENV = "LOCALCHARGE_CACHE_DIR"
CACHE_FILE = "invariants.jsonl"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "localcharge"


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_key(spec: BundleSpec, policy: TruncationPolicy) -> str:
    payload = _canonical({"spec": spec.to_json(), "policy": policy.to_json()})
    return hashlib.sha256(payload.encode()).hexdigest()


def _checksum(key: str, version: str, value: dict) -> str:
    return hashlib.sha256(_canonical([key, version, value]).encode()).hexdigest()


class InvariantCache:
    def __init__(self, directory=None, version: str = ENGINE_VERSION):
        self.dir = Path(directory) if directory is not None else default_cache_dir()
        self.version = version
        self.path = self.dir / CACHE_FILE
        self._lock = FileLock(str(self.path) + ".lock")
        self._entries: Optional[Dict[str, LocalInvariants]] = None
        self.rejected = 0

    def _load(self) -> Dict[str, LocalInvariants]:
        if self._entries is not None:
            return self._entries
        entries: Dict[str, LocalInvariants] = {}
        self.rejected = 0
        if self.path.exists():
            with open(self.path, encoding="utf-8", errors="replace") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        key, version, value = rec["key"], rec["version"], rec["value"]
                        if rec["checksum"] != _checksum(key, version, value):
                            raise ValueError("checksum mismatch")
                        inv = LocalInvariants(int(value["width"]), int(value["height"]), int(value["charge"]))
                    except (ValueError, KeyError, TypeError):
                        self.rejected += 1
                        continue
                    # version mismatch is not corruption, just not ours
                    if version == self.version:
                        entries.setdefault(key, inv)
        self._entries = entries
        return entries

    def get(self, spec: BundleSpec, policy: TruncationPolicy) -> Optional[LocalInvariants]:
        return self._load().get(cache_key(spec, policy))

    def put(self, spec: BundleSpec, policy: TruncationPolicy, value: LocalInvariants) -> None:
        key = cache_key(spec, policy)
        self.dir.mkdir(parents=True, exist_ok=True)
        with self._lock:
            # re-read under the lock; another process may have written this key
            self._entries = None
            if key in self._load():
                return
            val = value.to_json()
            rec = {"key": key, "version": self.version, "value": val, "checksum": _checksum(key, self.version, val)}
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_canonical(rec) + "\n")
            self._entries[key] = value
