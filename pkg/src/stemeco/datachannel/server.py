"""Share server: read-only export of a measurement store."""

from __future__ import annotations

import logging

from stemeco.datachannel import protocol
from stemeco.datachannel.store import MeasurementStore
from stemeco.errors import ConnectionClosed, DecodeError, NotFound, StoreIOError

logger = logging.getLogger(__name__)

DEFAULT_SHARE_PORT = 9520


class ShareServer:
    """Serves LIST/STAT/READ against one store root until closed."""

    def __init__(self, transport, store: MeasurementStore, host: str, port: int,
                 export: str = "measurements"):
        self._transport = transport
        self.store = store
        self.host = host
        self.port = port
        self.export = export
        self._listener = None

    def start(self) -> "ShareServer":
        self._listener = self._transport.listen(self.host, self.port, self._serve)
        self.port = self._listener.port
        return self

    def close(self) -> None:
        if self._listener is not None:
            self._listener.close()
            self._listener = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.close()

    def _serve(self, stream) -> None:
        while True:
            try:
                body = protocol.read_frame(stream)
            except ConnectionClosed:
                return
            try:
                response = self._handle(body)
            except NotFound as exc:
                response = protocol.encode_error_response(
                    protocol.ST_NOT_FOUND, str(exc))
            except (DecodeError, StoreIOError) as exc:
                response = protocol.encode_error_response(
                    protocol.ST_BAD_REQUEST, str(exc))
            try:
                protocol.write_frame(stream, response)
            except ConnectionClosed:
                return

    def _handle(self, body: bytes) -> bytes:
        op, fields = protocol.decode_request(body)
        if op == protocol.OP_LIST:
            entries = [protocol.ShareEntry(e.path, e.size, e.crc32)
                       for e in self.store.index()]
            return protocol.encode_list_response(entries)
        if op == protocol.OP_STAT:
            (path,) = fields
            data_size = self.store.size_of(path)
            crc = self._crc_for(path)
            return protocol.encode_stat_response(data_size, crc)
        if op == protocol.OP_READ:
            path, offset, length = fields
            data_size = self.store.size_of(path)
            if length > protocol.MAX_READ_LENGTH:
                return protocol.encode_error_response(
                    protocol.ST_BAD_REQUEST, f"read length {length} too large")
            if offset + length > data_size:
                return protocol.encode_error_response(
                    protocol.ST_RANGE_ERROR,
                    f"range {offset}+{length} past end of {data_size}-byte record")
            data = self.store.read_bytes(path)[offset:offset + length]
            return protocol.encode_read_response(data)
        raise DecodeError(f"unhandled opcode {op}")

    def _crc_for(self, path: str) -> str:
        for entry in self.store.index():
            if entry.path == path:
                return entry.crc32
        # present on disk but not indexed; compute directly
        from stemeco.datachannel.store import checksum
        return checksum(self.store.read_bytes(path))
