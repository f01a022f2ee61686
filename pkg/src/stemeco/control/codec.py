"""Control-channel message envelope and wire codec.

Framing is a 4-byte big-endian unsigned body length followed by a UTF-8
JSON body. JSON was chosen as the self-describing structured-text form;
byte strings are carried as ``{"__b64__": "<base64>"}`` so arbitrary
binary values survive the text encoding (that key is reserved and must
not appear in application dictionaries). Values must be JSON-safe:
strings, finite numbers, booleans, None, bytes, and lists/dicts of the
same. ``decode_message(encode_message(m)) == m`` for every such message.

The body size cap (default 16 MiB) is enforced on both encode and
decode: the control channel carries commands and small results, not bulk
measurement data.
"""

from __future__ import annotations

import base64
import json
import struct
from dataclasses import dataclass, field
from typing import Any, Union

from stemeco.errors import DecodeError, FrameTooLarge

DEFAULT_MAX_BODY = 16 * 1024 * 1024
_LEN = struct.Struct(">I")


@dataclass
class ControlRequest:
    request_id: int
    objectid: str
    method: str
    args: list = field(default_factory=list)


@dataclass
class ControlResponse:
    request_id: int
    ok: Any = None
    error: dict | None = None  # {"code", "message", "detail"}

    @property
    def is_error(self) -> bool:
        return self.error is not None


ControlMessage = Union[ControlRequest, ControlResponse]


def _tag_bytes(value):
    if isinstance(value, bytes):
        return {"__b64__": base64.b64encode(value).decode("ascii")}
    if isinstance(value, dict):
        return {k: _tag_bytes(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tag_bytes(v) for v in value]
    return value


def _untag_bytes(value):
    if isinstance(value, dict):
        if set(value.keys()) == {"__b64__"}:
            return base64.b64decode(value["__b64__"])
        return {k: _untag_bytes(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_untag_bytes(v) for v in value]
    return value


def encode_value(value) -> Any:
    """Make a value JSON-serializable (bytes become tagged base64)."""
    return _tag_bytes(value)


def decode_value(value) -> Any:
    return _untag_bytes(value)


def encode_message(msg: ControlMessage, max_body: int = DEFAULT_MAX_BODY) -> bytes:
    if isinstance(msg, ControlRequest):
        doc = {
            "kind": "request",
            "request_id": msg.request_id,
            "objectid": msg.objectid,
            "method": msg.method,
            "args": _tag_bytes(list(msg.args)),
        }
    elif isinstance(msg, ControlResponse):
        doc = {"kind": "response", "request_id": msg.request_id}
        if msg.error is not None:
            doc["error"] = msg.error
        else:
            doc["ok"] = _tag_bytes(msg.ok)
    else:
        raise TypeError(f"not a control message: {type(msg).__name__}")
    try:
        body = json.dumps(doc, allow_nan=False, separators=(",", ":")).encode("utf-8")
    except (TypeError, ValueError) as exc:
        raise DecodeError(f"message not encodable: {exc}") from None
    if len(body) > max_body:
        raise FrameTooLarge(f"body {len(body)} bytes exceeds cap {max_body}")
    return _LEN.pack(len(body)) + body


def decode_message(data: bytes, max_body: int = DEFAULT_MAX_BODY) -> ControlMessage:
    if len(data) < _LEN.size:
        raise DecodeError("short frame: missing length prefix")
    (length,) = _LEN.unpack_from(data)
    if length > max_body:
        raise FrameTooLarge(f"declared body {length} bytes exceeds cap {max_body}")
    body = data[_LEN.size:]
    if len(body) != length:
        raise DecodeError(f"length prefix {length} does not match body {len(body)}")
    return decode_body(body)


def decode_body(body: bytes) -> ControlMessage:
    """Decode a frame body (bytes after the length prefix)."""
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecodeError(f"malformed body: {exc}") from None
    if not isinstance(doc, dict):
        raise DecodeError("body is not a key/value document")
    kind = doc.get("kind")
    try:
        if kind == "request":
            return ControlRequest(
                request_id=int(doc["request_id"]),
                objectid=doc["objectid"],
                method=doc["method"],
                args=_untag_bytes(doc["args"]),
            )
        if kind == "response":
            rid = int(doc["request_id"])
            if "error" in doc:
                err = doc["error"]
                if not isinstance(err, dict) or "code" not in err:
                    raise DecodeError("response error missing code")
                return ControlResponse(request_id=rid, error=err)
            return ControlResponse(request_id=rid, ok=_untag_bytes(doc.get("ok")))
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"incomplete message: {exc}") from None
    raise DecodeError(f"unknown message kind: {kind!r}")


def write_message(stream, msg: ControlMessage, max_body: int = DEFAULT_MAX_BODY) -> None:
    stream.send_all(encode_message(msg, max_body=max_body))


def read_message(stream, max_body: int = DEFAULT_MAX_BODY,
                 timeout: float | None = None) -> ControlMessage:
    """Read one framed message from a stream.

    Raises FrameTooLarge without consuming the oversized body; callers
    should treat that as a protocol violation and close the connection.
    """
    header = stream.recv_exactly(_LEN.size, timeout=timeout)
    (length,) = _LEN.unpack(header)
    if length > max_body:
        raise FrameTooLarge(f"declared body {length} bytes exceeds cap {max_body}")
    body = stream.recv_exactly(length, timeout=timeout)
    return decode_body(body)
