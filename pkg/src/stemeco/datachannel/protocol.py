"""Share wire protocol: the remote-mount stand-in.

Binary request/response protocol over one stream. Every message is a
4-byte big-endian length followed by the body. Request bodies start
with an opcode byte (LIST=1, STAT=2, READ=3); response bodies start
with a status byte (OK=0, NOT_FOUND=1, RANGE_ERROR=2, BAD_REQUEST=3).
All integer fields are big-endian. Paths are UTF-8 with a u16 length
prefix.

    LIST request:   op
    LIST response:  status, u32 count, count * (path, u64 size, u32 crc32)
    STAT request:   op, path
    STAT response:  status, u64 size, u32 crc32
    READ request:   op, path, u64 offset, u32 length
    READ response:  status, raw bytes
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from stemeco.errors import DecodeError, NotFound, RangeError, RemoteError

OP_LIST = 1
OP_STAT = 2
OP_READ = 3

ST_OK = 0
ST_NOT_FOUND = 1
ST_RANGE_ERROR = 2
ST_BAD_REQUEST = 3

_LEN = struct.Struct(">I")
_U16 = struct.Struct(">H")
_U32 = struct.Struct(">I")
_U64 = struct.Struct(">Q")

MAX_READ_LENGTH = 1 << 31  # sanity cap on one READ


@dataclass(frozen=True)
class ShareEntry:
    path: str
    size: int
    crc32: str


def _pack_path(path: str) -> bytes:
    raw = path.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DecodeError("path too long")
    return _U16.pack(len(raw)) + raw


def _unpack_path(body: bytes, offset: int) -> tuple[str, int]:
    if offset + _U16.size > len(body):
        raise DecodeError("truncated path length")
    (n,) = _U16.unpack_from(body, offset)
    offset += _U16.size
    if offset + n > len(body):
        raise DecodeError("truncated path")
    return body[offset:offset + n].decode("utf-8"), offset + n


# -- requests --

def encode_list_request() -> bytes:
    return bytes([OP_LIST])


def encode_stat_request(path: str) -> bytes:
    return bytes([OP_STAT]) + _pack_path(path)


def encode_read_request(path: str, offset: int, length: int) -> bytes:
    return bytes([OP_READ]) + _pack_path(path) + _U64.pack(offset) + _U32.pack(length)


def decode_request(body: bytes) -> tuple[int, tuple]:
    """Returns (opcode, fields); fields depend on the opcode."""
    if not body:
        raise DecodeError("empty request")
    op = body[0]
    if op == OP_LIST:
        return OP_LIST, ()
    if op == OP_STAT:
        path, end = _unpack_path(body, 1)
        if end != len(body):
            raise DecodeError("trailing bytes in STAT request")
        return OP_STAT, (path,)
    if op == OP_READ:
        path, pos = _unpack_path(body, 1)
        if pos + _U64.size + _U32.size != len(body):
            raise DecodeError("bad READ request length")
        (offset,) = _U64.unpack_from(body, pos)
        (length,) = _U32.unpack_from(body, pos + _U64.size)
        return OP_READ, (path, offset, length)
    raise DecodeError(f"unknown opcode {op}")


# -- responses --

def encode_list_response(entries: list[ShareEntry]) -> bytes:
    parts = [bytes([ST_OK]), _U32.pack(len(entries))]
    for e in entries:
        parts.append(_pack_path(e.path))
        parts.append(_U64.pack(e.size))
        parts.append(_U32.pack(int(e.crc32, 16)))
    return b"".join(parts)


def encode_stat_response(size: int, crc32: str) -> bytes:
    return bytes([ST_OK]) + _U64.pack(size) + _U32.pack(int(crc32, 16))


def encode_read_response(data: bytes) -> bytes:
    return bytes([ST_OK]) + data


def encode_error_response(status: int, message: str = "") -> bytes:
    return bytes([status]) + message.encode("utf-8")


def raise_for_status(body: bytes) -> bytes:
    """Strip the status byte, raising the matching error on failure."""
    if not body:
        raise DecodeError("empty response")
    status, rest = body[0], body[1:]
    if status == ST_OK:
        return rest
    message = rest.decode("utf-8", errors="replace")
    if status == ST_NOT_FOUND:
        raise NotFound(message or "not found")
    if status == ST_RANGE_ERROR:
        raise RangeError(message or "read past end")
    if status == ST_BAD_REQUEST:
        raise RemoteError(message or "bad request")
    raise DecodeError(f"unknown status {status}")


def decode_list_response(body: bytes) -> list[ShareEntry]:
    rest = raise_for_status(body)
    if len(rest) < _U32.size:
        raise DecodeError("truncated LIST response")
    (count,) = _U32.unpack_from(rest, 0)
    pos = _U32.size
    entries = []
    for _ in range(count):
        path, pos = _unpack_path(rest, pos)
        if pos + _U64.size + _U32.size > len(rest):
            raise DecodeError("truncated LIST entry")
        (size,) = _U64.unpack_from(rest, pos)
        pos += _U64.size
        (crc,) = _U32.unpack_from(rest, pos)
        pos += _U32.size
        entries.append(ShareEntry(path=path, size=size, crc32=f"{crc:08x}"))
    if pos != len(rest):
        raise DecodeError("trailing bytes in LIST response")
    return entries


def decode_stat_response(body: bytes) -> tuple[int, str]:
    rest = raise_for_status(body)
    if len(rest) != _U64.size + _U32.size:
        raise DecodeError("bad STAT response length")
    (size,) = _U64.unpack_from(rest, 0)
    (crc,) = _U32.unpack_from(rest, _U64.size)
    return size, f"{crc:08x}"


def decode_read_response(body: bytes) -> bytes:
    return raise_for_status(body)


# -- framing --

def write_frame(stream, body: bytes) -> None:
    stream.send_all(_LEN.pack(len(body)) + body)


def read_frame(stream, timeout: float | None = None) -> bytes:
    header = stream.recv_exactly(_LEN.size, timeout=timeout)
    (length,) = _LEN.unpack(header)
    return stream.recv_exactly(length, timeout=timeout)
