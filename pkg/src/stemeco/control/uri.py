"""Remote-object URI parsing and rendering.

Canonical form: ``PYRO:<objectid>@<host>:<port>``. The scheme prefix is
case-sensitive, the objectid must be non-empty and free of ``@``, the
final ``:`` separates the TCP port (1-65535). ``parse_uri(render_uri(u))``
is the identity for every valid ``ObjectUri``.
"""

from __future__ import annotations

from dataclasses import dataclass

from stemeco.errors import MalformedUri

SCHEME = "PYRO:"


@dataclass(frozen=True)
class ObjectUri:
    objectid: str
    host: str
    port: int


def parse_uri(text: str) -> ObjectUri:
    if not isinstance(text, str) or not text.startswith(SCHEME):
        raise MalformedUri(f"missing {SCHEME!r} scheme: {text!r}")
    rest = text[len(SCHEME):]
    if rest.count("@") != 1:
        raise MalformedUri(f"expected exactly one '@': {text!r}")
    objectid, location = rest.split("@", 1)
    if not objectid:
        raise MalformedUri(f"empty objectid: {text!r}")
    host, sep, port_text = location.rpartition(":")
    if not sep or not host:
        raise MalformedUri(f"missing host or port: {text!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise MalformedUri(f"port is not an integer: {text!r}") from None
    if not 1 <= port <= 65535:
        raise MalformedUri(f"port out of range 1-65535: {text!r}")
    return ObjectUri(objectid=objectid, host=host, port=port)


def render_uri(uri: ObjectUri) -> str:
    return f"{SCHEME}{uri.objectid}@{uri.host}:{uri.port}"
