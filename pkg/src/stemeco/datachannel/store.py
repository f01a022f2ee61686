"""Measurement store: the instrument-side file repository.

One STEMFRM1 file per frame, named ``<session>_<channel>_<frame_index>
.stemfrm``, written atomically (temp file + rename) so readers never see
a partial record. An append-only ``index.tsv`` lists every record as
tab-separated ``path<TAB>size<TAB>crc32``; the share server exports the
listing straight from this index.
"""

from __future__ import annotations

import errno
import os
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

from stemeco.errors import NotFound, StorageFull, StoreIOError
from stemeco.datachannel import format as stemfrm

INDEX_NAME = "index.tsv"
RECORD_SUFFIX = ".stemfrm"


@dataclass(frozen=True)
class IndexEntry:
    path: str
    size: int
    crc32: str  # 8 hex digits

    def line(self) -> str:
        return f"{self.path}\t{self.size}\t{self.crc32}\n"


def checksum(data: bytes) -> str:
    return f"{zlib.crc32(data) & 0xFFFFFFFF:08x}"


class MeasurementStore:
    """Filesystem-backed frame store with an append-only index."""

    def __init__(self, root: str | Path, clock=None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._lock = threading.Lock()

    @property
    def index_path(self) -> Path:
        return self.root / INDEX_NAME

    def store_frames(self, frames, session: str, scan_params=None) -> list[str]:
        """Persist frames; returns the relative paths written."""
        paths = []
        for frame in frames:
            name = f"{session}_{frame.channel}_{frame.frame_index}{RECORD_SUFFIX}"
            stored_at = self._clock.now() if self._clock is not None else 0.0
            metadata = stemfrm.frame_metadata(frame, session, stored_at, scan_params)
            data = stemfrm.encode_frame(frame, metadata)
            self._write_record(name, data)
            paths.append(name)
        return paths

    def store_record(self, record: stemfrm.MeasurementRecord, name: str) -> str:
        self._write_record(name, stemfrm.encode_record(record))
        return name

    def _write_record(self, name: str, data: bytes) -> None:
        target = self.root / name
        tmp = self.root / (name + ".tmp")
        with self._lock:
            if target.exists():
                raise StoreIOError(f"record already exists: {name}")
            try:
                tmp.write_bytes(data)
                os.replace(tmp, target)
                with open(self.index_path, "a", encoding="utf-8") as index:
                    index.write(IndexEntry(name, len(data), checksum(data)).line())
            except OSError as exc:
                tmp.unlink(missing_ok=True)
                if exc.errno == errno.ENOSPC:
                    raise StorageFull(f"store device full writing {name}") from None
                raise StoreIOError(f"writing {name}: {exc}") from None

    def index(self) -> list[IndexEntry]:
        try:
            lines = self.index_path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            return []
        except OSError as exc:
            raise StoreIOError(f"reading index: {exc}") from None
        entries = []
        for line in lines:
            path, size, crc = line.split("\t")
            entries.append(IndexEntry(path=path, size=int(size), crc32=crc))
        return entries

    def read_bytes(self, relpath: str) -> bytes:
        target = self._resolve(relpath)
        try:
            return target.read_bytes()
        except FileNotFoundError:
            raise NotFound(f"no record {relpath!r}") from None
        except OSError as exc:
            raise StoreIOError(f"reading {relpath}: {exc}") from None

    def read_record(self, relpath: str) -> stemfrm.MeasurementRecord:
        return stemfrm.decode_record(self.read_bytes(relpath))

    def size_of(self, relpath: str) -> int:
        target = self._resolve(relpath)
        try:
            return target.stat().st_size
        except FileNotFoundError:
            raise NotFound(f"no record {relpath!r}") from None

    def _resolve(self, relpath: str) -> Path:
        # share paths are flat names; refuse anything that escapes the root
        if "/" in relpath or "\\" in relpath or relpath in ("", ".", ".."):
            raise NotFound(f"invalid record path {relpath!r}")
        return self.root / relpath
