"""Control-channel server: publishes task objects and dispatches requests.

The registry is the publication table: each objectid maps to one object
whose advertised methods may be invoked remotely. The server accepts
any number of concurrent client connections; requests on one connection
are answered in order (pipelining allowed), and errors are returned
in-band so a misbehaving request never takes the server down.
"""

from __future__ import annotations

import inspect
import logging

from stemeco.control import codec
from stemeco.control.uri import ObjectUri, render_uri
from stemeco.errors import (
    ApplicationError, BadArguments, ConnectionClosed, DecodeError,
    FrameTooLarge, RemoteError, StemecoError, Timeout, UnknownMethod,
    UnknownObject,
)

logger = logging.getLogger(__name__)


class ObjectRegistry:
    """Maps objectid -> published object and its advertised method set."""

    def __init__(self):
        self._objects: dict[str, tuple[object, frozenset[str]]] = {}

    def register(self, objectid: str, obj: object,
                 methods: list[str] | None = None) -> None:
        if not objectid:
            raise ValueError("objectid must be non-empty")
        if objectid in self._objects:
            raise ValueError(f"objectid already registered: {objectid}")
        if methods is None:
            methods = [name for name in dir(obj)
                       if not name.startswith("_") and callable(getattr(obj, name))]
        self._objects[objectid] = (obj, frozenset(methods))

    def objectids(self) -> list[str]:
        return list(self._objects)

    def lookup(self, objectid: str) -> tuple[object, frozenset[str]]:
        try:
            return self._objects[objectid]
        except KeyError:
            raise UnknownObject(f"no published object {objectid!r}") from None


class ControlServer:
    """Serves registry objects over a transport until closed."""

    def __init__(self, transport, registry: ObjectRegistry, host: str, port: int,
                 max_body: int = codec.DEFAULT_MAX_BODY):
        self._transport = transport
        self.registry = registry
        self.host = host
        self.port = port
        self.max_body = max_body
        self._listener = None

    def start(self) -> "ControlServer":
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

    def uri_for(self, objectid: str) -> ObjectUri:
        return ObjectUri(objectid=objectid, host=self.host, port=self.port)

    def uris(self) -> list[str]:
        return [render_uri(self.uri_for(oid)) for oid in self.registry.objectids()]

    # -- per-connection loop --

    def _serve(self, stream) -> None:
        while True:
            try:
                request = codec.read_message(stream, max_body=self.max_body)
            except ConnectionClosed:
                return
            except (FrameTooLarge, DecodeError, Timeout) as exc:
                # cannot trust the stream after a framing violation
                logger.warning("closing connection on protocol error: %s", exc)
                return
            if not isinstance(request, codec.ControlRequest):
                logger.warning("closing connection: got a non-request message")
                return
            response = self._dispatch(request)
            try:
                codec.write_message(stream, response, max_body=self.max_body)
            except FrameTooLarge:
                oversize = codec.ControlResponse(
                    request_id=request.request_id,
                    error={"code": "FrameTooLarge",
                           "message": "response exceeds the control-channel size cap; "
                                      "fetch the measurement over the data channel",
                           "detail": {}})
                codec.write_message(stream, oversize, max_body=self.max_body)
            except ConnectionClosed:
                return

    def _dispatch(self, request: codec.ControlRequest) -> codec.ControlResponse:
        try:
            obj, methods = self.registry.lookup(request.objectid)
            if request.method not in methods:
                raise UnknownMethod(
                    f"object {request.objectid!r} has no method {request.method!r}")
            fn = getattr(obj, request.method)
            try:
                inspect.signature(fn).bind(*request.args)
            except TypeError as exc:
                raise BadArguments(f"{request.method}: {exc}") from None
            result = fn(*request.args)
            return codec.ControlResponse(request_id=request.request_id, ok=result)
        except RemoteError as exc:
            return codec.ControlResponse(request_id=request.request_id,
                                         error=exc.to_wire())
        except StemecoError as exc:
            wrapped = ApplicationError(str(exc),
                                       detail={"kind": type(exc).__name__})
            return codec.ControlResponse(request_id=request.request_id,
                                         error=wrapped.to_wire())
        except Exception as exc:  # noqa: BLE001 - server must stay up
            logger.exception("unhandled error in %s.%s",
                             request.objectid, request.method)
            wrapped = ApplicationError(f"{type(exc).__name__}: {exc}",
                                       detail={"kind": type(exc).__name__})
            return codec.ControlResponse(request_id=request.request_id,
                                         error=wrapped.to_wire())
