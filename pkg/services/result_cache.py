"""
ResultCache - append-only JSON-lines store of computed constants
The last line for a key wins; lines written by another engine version are skipped
Lines also carry node_count and elapsed_ms so a rerun can compare search effort
"""

import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import simplejson
from dateutil.parser import isoparse

from services.davenport_search import ConstantRecord
from services.errors import DavenportError
from services.logger import Logger


ENGINE_VERSION = "1.0.0"


class CacheFormatError(DavenportError):
    """Custom exception for cache lines that cannot be decoded"""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"Cache line {line_number}: {reason}", {'line': line_number})


def dumps(data: Any) -> str:
    """Byte-deterministic JSON: sorted keys, compact separators"""
    return simplejson.dumps(data, sort_keys=True, separators=(",", ":"))


def cache_key(n: int, weight_spec: str, constant_kind: str) -> str:
    return f"{constant_kind}:{n}:{weight_spec}"


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class CacheEntry:
    key: str
    record: ConstantRecord
    engine_version: str
    ts: datetime

    def to_dict(self) -> Dict[str, Any]:
        return {
            'key': self.key,
            'kind': self.record.constant_kind,
            'n': self.record.n,
            'weights': self.record.weight_spec,
            'value': self.record.value,
            'status': self.record.status,
            'witness': list(self.record.witness),
            'node_count': self.record.node_count,
            'elapsed_ms': self.record.elapsed_ms,
            'engine_version': self.engine_version,
            'ts': self.ts.isoformat(timespec="seconds"),
        }

    def to_line(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CacheEntry":
        record = ConstantRecord(
            n=int(data['n']),
            weight_spec=str(data['weights']),
            constant_kind=str(data['kind']),
            value=int(data['value']),
            witness=tuple(int(x) for x in data['witness']),
            status=str(data['status']),
            elapsed_ms=float(data.get('elapsed_ms', 0.0)),
            node_count=int(data.get('node_count', 0)),
        )
        return cls(
            key=str(data['key']),
            record=record,
            engine_version=str(data['engine_version']),
            ts=isoparse(data['ts']),
        )


class ResultCache:
    """JSONL cache of ConstantRecords keyed by (n, weight spec, constant kind)"""

    def __init__(self, path: str, engine_version: str = ENGINE_VERSION):
        self.path = path
        self.engine_version = engine_version
        self._lock = threading.Lock()
        self._entries: Optional[Dict[str, CacheEntry]] = None
        Logger.debug(f"ResultCache at {path} (engine {engine_version})")

    def _parse_line(self, line_number: int, line: str) -> CacheEntry:
        try:
            return CacheEntry.from_dict(simplejson.loads(line))
        except (simplejson.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise CacheFormatError(line_number, str(e))

    def load(self) -> Dict[str, CacheEntry]:
        """Read the whole file; bad lines and foreign engine versions are skipped"""
        entries: Dict[str, CacheEntry] = {}
        if not os.path.exists(self.path):
            self._entries = entries
            return entries

        skipped = 0
        with open(self.path, "r", encoding="utf-8") as handle:
            for line_number, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    entry = self._parse_line(line_number, line)
                except CacheFormatError as e:
                    Logger.warning(f"Skipping unreadable cache line: {e}")
                    continue
                if entry.engine_version != self.engine_version:
                    skipped += 1
                    continue
                entries[entry.key] = entry

        if skipped:
            Logger.info(f"Ignored {skipped} cache entries from other engine versions")
        self._entries = entries
        return entries

    @property
    def entries(self) -> Dict[str, CacheEntry]:
        if self._entries is None:
            self.load()
        return self._entries

    def get(self, n: int, weight_spec: str, constant_kind: str) -> Optional[ConstantRecord]:
        entry = self.entries.get(cache_key(n, weight_spec, constant_kind))
        return entry.record if entry else None

    def put(self, record: ConstantRecord, ts: Optional[datetime] = None) -> CacheEntry:
        """Append one line; concurrent writers inside this process are serialized"""
        entry = CacheEntry(
            key=cache_key(record.n, record.weight_spec, record.constant_kind),
            record=record,
            engine_version=self.engine_version,
            ts=ts or utc_now(),
        )
        line = entry.to_line()
        with self._lock:
            directory = os.path.dirname(os.path.abspath(self.path))
            os.makedirs(directory, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
            self.entries[entry.key] = entry
        Logger.debug(f"Cached {entry.key} = {record.value} [{record.status}]")
        return entry
