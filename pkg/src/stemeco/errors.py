"""Exception hierarchy shared by all stemeco subsystems.

Errors crossing the control channel are serialized in-band with a code
string; ``RemoteError.from_wire`` reconstructs the matching class on the
client side so callers can catch the same types locally and remotely.
"""

from __future__ import annotations


class StemecoError(Exception):
    """Base class for all errors raised by this package."""


# --- URI / codec ---

class MalformedUri(StemecoError):
    """Text does not match the PYRO:objectid@host:port grammar."""


class FrameTooLarge(StemecoError):
    """Encoded message body exceeds the control-channel size cap."""


class DecodeError(StemecoError):
    """Byte sequence is not a well-formed control message."""


# --- instrument ---

class InstrumentError(StemecoError):
    """Base for errors raised by instrument task execution."""


class InvalidChannel(InstrumentError):
    """Channel index outside the configured channel count."""


class BufferExceeded(InstrumentError):
    """Requested more frames than the frame buffer can hold."""


class Busy(InstrumentError):
    """A scan is already in progress; concurrent scans are rejected."""


class OutOfRange(InstrumentError):
    """Probe coordinate outside the unit scan field."""


# --- transport / network ---

class TransportError(StemecoError):
    pass


class BindError(TransportError):
    """Could not bind the requested host/port."""


class ConnectionRefused(TransportError):
    """Connection denied: firewall, no listener, or refused socket.

    ``reason`` is one of "firewall", "no-listener", "socket".
    """

    def __init__(self, message: str, reason: str = "socket"):
        super().__init__(message)
        self.reason = reason


class ConnectionClosed(TransportError):
    """Peer closed the connection mid-exchange."""


class Timeout(TransportError):
    """Operation did not complete within its deadline."""


class Unroutable(TransportError):
    """No route exists between the requested endpoints."""


# --- control channel, in-band remote errors ---

class RemoteError(StemecoError):
    """Error returned by the remote side of a control invocation."""

    code = "RemoteError"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}

    def to_wire(self) -> dict:
        return {"code": self.code, "message": str(self), "detail": self.detail}

    @staticmethod
    def from_wire(doc: dict) -> StemecoError:
        """Rebuild the most specific local exception for a wire error."""
        code = doc.get("code", "RemoteError")
        message = doc.get("message", "")
        detail = doc.get("detail") or {}
        cls = _REMOTE_CODES.get(code, RemoteError)
        if cls is ApplicationError:
            kind = detail.get("kind")
            inner = _APPLICATION_KINDS.get(kind)
            if inner is not None:
                return inner(message)
        err = cls(message)
        if isinstance(err, RemoteError):
            err.detail = detail
        return err


class UnknownObject(RemoteError):
    code = "UnknownObject"


class UnknownMethod(RemoteError):
    code = "UnknownMethod"


class BadArguments(RemoteError):
    code = "BadArguments"


class ApplicationError(RemoteError):
    """Wraps an exception raised inside a published object's method."""

    code = "ApplicationError"


class RemoteFrameTooLarge(RemoteError):
    """Response exceeded the control-channel cap; use the data channel."""

    code = "FrameTooLarge"


_REMOTE_CODES = {
    cls.code: cls
    for cls in (RemoteError, UnknownObject, UnknownMethod, BadArguments,
                ApplicationError, RemoteFrameTooLarge)
}

# Instrument errors survive the wire: the server wraps them in an
# ApplicationError with detail {"kind": <class name>} and the client
# re-raises the original class.
_APPLICATION_KINDS = {
    cls.__name__: cls
    for cls in (InvalidChannel, BufferExceeded, Busy, OutOfRange)
}


# --- data channel ---

class DataChannelError(StemecoError):
    pass


class StorageFull(DataChannelError):
    """Store device out of space."""


class StoreIOError(DataChannelError):
    """Unexpected I/O failure while writing or reading the store."""


class NotFound(DataChannelError):
    """No such record in the share."""


class RangeError(DataChannelError):
    """Read range extends past the end of the record."""


class StaleHandle(DataChannelError):
    """Operation on a closed share handle."""


class CorruptRecord(DataChannelError):
    """Record header and payload disagree (length or checksum)."""


# --- configuration documents ---

class SchemaError(StemecoError):
    """Configuration document is structurally invalid."""


# --- topology / twin ---

class TopologyError(StemecoError):
    pass


class DanglingReference(TopologyError):
    """Document names an entity that is not declared."""


class AddressCollision(TopologyError):
    """Two interfaces declare the same address."""


# --- scenarios ---

class ScenarioError(StemecoError):
    pass


class StepFailure(ScenarioError):
    """A scenario step raised instead of producing a result."""

    def __init__(self, index: int, name: str, cause: str):
        super().__init__(f"step {index} ({name}) failed: {cause}")
        self.index = index
        self.name = name
        self.cause = cause


class AssertFailure(ScenarioError):
    """A scenario step produced a result that violates its expectation."""

    def __init__(self, index: int, name: str, expected, actual):
        super().__init__(
            f"step {index} ({name}) expectation {expected!r} not met by {actual!r}")
        self.index = index
        self.name = name
        self.expected = expected
        self.actual = actual
