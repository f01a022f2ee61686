"""Transport abstraction: the seam between field deployment and the twin.

Servers and clients are written against ``Transport``/``Stream`` only.
``RealTransport`` backs them with TCP sockets and OS threads for field
use; ``VirtualTransport`` (see ``stemeco.netem.engine``) backs the same
code with the deterministic in-process network so it can be developed
and tested without touching real infrastructure.
"""

from __future__ import annotations

import socket
import threading
from typing import Callable, Protocol

from stemeco.clock import WallClock
from stemeco.errors import BindError, ConnectionClosed, ConnectionRefused, Timeout


class Stream(Protocol):
    """Bidirectional ordered reliable byte stream."""

    def send_all(self, data: bytes) -> None: ...

    def recv_exactly(self, n: int, timeout: float | None = None) -> bytes: ...

    def close(self) -> None: ...


class Listener(Protocol):
    port: int

    def close(self) -> None: ...


class Transport(Protocol):
    def listen(self, host: str, port: int,
               handler: Callable[[Stream], None]) -> Listener: ...

    def connect(self, host: str, port: int,
                timeout: float | None = None) -> Stream: ...

    @property
    def clock(self): ...


class SocketStream:
    """Blocking socket wrapper with exact-read semantics."""

    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._closed = False

    def send_all(self, data: bytes) -> None:
        try:
            self._sock.sendall(data)
        except OSError as exc:
            raise ConnectionClosed(f"send failed: {exc}") from None

    def recv_exactly(self, n: int, timeout: float | None = None) -> bytes:
        self._sock.settimeout(timeout)
        chunks = bytearray()
        try:
            while len(chunks) < n:
                chunk = self._sock.recv(min(65536, n - len(chunks)))
                if not chunk:
                    raise ConnectionClosed(
                        f"peer closed after {len(chunks)}/{n} bytes")
                chunks += chunk
        except socket.timeout:
            raise Timeout(f"recv of {n} bytes timed out after {timeout}s") from None
        except OSError as exc:
            raise ConnectionClosed(f"recv failed: {exc}") from None
        return bytes(chunks)

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            try:
                self._sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self._sock.close()


class SocketListener:
    def __init__(self, sock: socket.socket, handler: Callable[[Stream], None]):
        self._sock = sock
        self._handler = handler
        self._closed = False
        self.port = sock.getsockname()[1]
        self._thread = threading.Thread(
            target=self._accept_loop, name=f"listener:{self.port}", daemon=True)
        self._thread.start()

    def _accept_loop(self) -> None:
        while not self._closed:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return  # listener closed
            stream = SocketStream(conn)
            threading.Thread(
                target=self._serve, args=(stream,),
                name=f"conn:{self.port}", daemon=True).start()

    def _serve(self, stream: SocketStream) -> None:
        try:
            self._handler(stream)
        finally:
            stream.close()

    def close(self) -> None:
        self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass


class RealTransport:
    """TCP sockets and wall-clock time."""

    def __init__(self):
        self.clock = WallClock()

    def listen(self, host: str, port: int,
               handler: Callable[[Stream], None]) -> SocketListener:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((host, port))
            sock.listen(64)
        except OSError as exc:
            sock.close()
            raise BindError(f"cannot bind {host}:{port}: {exc}") from None
        return SocketListener(sock, handler)

    def connect(self, host: str, port: int,
                timeout: float | None = None) -> SocketStream:
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except ConnectionRefusedError as exc:
            raise ConnectionRefused(f"{host}:{port}: {exc}", reason="socket") from None
        except socket.timeout:
            raise Timeout(f"connect to {host}:{port} timed out") from None
        except OSError as exc:
            raise ConnectionRefused(f"{host}:{port}: {exc}", reason="socket") from None
        sock.settimeout(None)
        return SocketStream(sock)
