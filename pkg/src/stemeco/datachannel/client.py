"""Share client: the mounted-directory view of a remote store.

``mount_share`` opens a session against a share server; the handle then
lists and fetches records the same way a remotely mounted NAS directory
would expose them, with no manual transfer step in between. Fetches
stream in chunks, verify payload length against the record header and
the checksum against the share listing.
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass

from stemeco.datachannel import format as stemfrm
from stemeco.datachannel import protocol
from stemeco.datachannel.protocol import ShareEntry
from stemeco.errors import CorruptRecord, StaleHandle

DEFAULT_FETCH_CHUNK = 4 * 1024 * 1024

_session_ids = itertools.count(1)


@dataclass
class FetchedRecord:
    path: str
    data: bytes
    record: stemfrm.MeasurementRecord


class ShareHandle:
    """One mounted share session over one connection."""

    def __init__(self, stream, endpoint: tuple[str, int], export: str,
                 timeout: float | None = 30.0):
        self._stream = stream
        self.endpoint = endpoint
        self.export = export
        self.session_id = next(_session_ids)
        self.timeout = timeout
        self._closed = False

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _roundtrip(self, request: bytes) -> bytes:
        if self._closed:
            raise StaleHandle(f"share session {self.session_id} is closed")
        protocol.write_frame(self._stream, request)
        return protocol.read_frame(self._stream, timeout=self.timeout)

    def list_measurements(self) -> list[ShareEntry]:
        return protocol.decode_list_response(
            self._roundtrip(protocol.encode_list_request()))

    def stat(self, path: str) -> tuple[int, str]:
        return protocol.decode_stat_response(
            self._roundtrip(protocol.encode_stat_request(path)))

    def read(self, path: str, offset: int, length: int) -> bytes:
        return protocol.decode_read_response(
            self._roundtrip(protocol.encode_read_request(path, offset, length)))

    def fetch_bytes(self, path: str, chunk_size: int = DEFAULT_FETCH_CHUNK) -> bytes:
        """Stream a record's raw file bytes; chunk_size 0 reads it whole."""
        size, crc = self.stat(path)
        if chunk_size <= 0:
            chunk_size = max(size, 1)
        parts = []
        offset = 0
        while offset < size:
            n = min(chunk_size, size - offset)
            parts.append(self.read(path, offset, n))
            offset += n
        data = b"".join(parts)
        if len(data) != size:
            raise CorruptRecord(
                f"{path}: fetched {len(data)} bytes, share reported {size}")
        if f"{zlib.crc32(data) & 0xFFFFFFFF:08x}" != crc:
            raise CorruptRecord(f"{path}: checksum mismatch after fetch")
        return data

    def fetch_measurement(self, path: str,
                          chunk_size: int = DEFAULT_FETCH_CHUNK) -> FetchedRecord:
        """Fetch and decode one record, validating header against payload."""
        data = self.fetch_bytes(path, chunk_size=chunk_size)
        record = stemfrm.decode_record(data)  # raises CorruptRecord on mismatch
        return FetchedRecord(path=path, data=data, record=record)


def mount_share(endpoint: tuple[str, int], *, transport,
                export: str = "measurements",
                timeout: float | None = 30.0) -> ShareHandle:
    host, port = endpoint
    stream = transport.connect(host, port, timeout=timeout)
    return ShareHandle(stream, endpoint=(host, port), export=export,
                       timeout=timeout)
