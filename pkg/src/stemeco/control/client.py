"""Control-channel client: one-shot invocations and a convenience proxy.

Each invoke opens a connection, sends one request, waits for the
matching response and closes — the same lifecycle as the one-shot
steering client scripts. Remote errors are re-raised locally with their
original type where known.
"""

from __future__ import annotations

import itertools

from stemeco.control import codec
from stemeco.control.uri import ObjectUri, parse_uri
from stemeco.errors import DecodeError, RemoteError

DEFAULT_TIMEOUT = 30.0

_request_ids = itertools.count(1)


def invoke(uri: ObjectUri | str, method: str, args: list | None = None, *,
           transport, timeout: float | None = DEFAULT_TIMEOUT):
    """Call one method on a published object and return its result.

    Raises ConnectionRefused / Timeout on transport failure and the
    reconstructed remote error when the server answers with one.
    """
    if isinstance(uri, str):
        uri = parse_uri(uri)
    request = codec.ControlRequest(
        request_id=next(_request_ids),
        objectid=uri.objectid,
        method=method,
        args=list(args or []),
    )
    stream = transport.connect(uri.host, uri.port, timeout=timeout)
    try:
        codec.write_message(stream, request)
        response = codec.read_message(stream, timeout=timeout)
    finally:
        stream.close()
    if not isinstance(response, codec.ControlResponse):
        raise DecodeError("server sent a non-response message")
    if response.request_id != request.request_id:
        raise DecodeError(
            f"response id {response.request_id} does not match "
            f"request id {request.request_id}")
    if response.is_error:
        raise RemoteError.from_wire(response.error)
    return response.ok


class RemoteObject:
    """Attribute-style proxy: ``remote.scan_status()`` -> invoke."""

    def __init__(self, uri: ObjectUri | str, transport,
                 timeout: float | None = DEFAULT_TIMEOUT):
        self._uri = parse_uri(uri) if isinstance(uri, str) else uri
        self._transport = transport
        self._timeout = timeout

    def __getattr__(self, method: str):
        if method.startswith("_"):
            raise AttributeError(method)

        def call(*args):
            return invoke(self._uri, method, list(args),
                          transport=self._transport, timeout=self._timeout)

        call.__name__ = method
        return call
