from stemeco.control.client import RemoteObject, invoke
from stemeco.control.codec import (
    ControlRequest,
    ControlResponse,
    decode_message,
    encode_message,
)
from stemeco.control.server import ControlServer, ObjectRegistry
from stemeco.control.uri import ObjectUri, parse_uri, render_uri

__all__ = [
    "ControlRequest",
    "ControlResponse",
    "ControlServer",
    "ObjectRegistry",
    "ObjectUri",
    "RemoteObject",
    "decode_message",
    "encode_message",
    "invoke",
    "parse_uri",
    "render_uri",
]
