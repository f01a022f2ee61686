"""Time source abstraction.

The instrument and servers never call ``time`` directly; they hold a
Clock so the same code runs against the wall clock in field deployments
and against the twin's virtual clock in tests and scenario runs.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable

NS_PER_SECOND = 1_000_000_000


def seconds_to_ns(seconds: float) -> int:
    """Convert seconds to integer nanoseconds (round half away from drift)."""
    return round(seconds * NS_PER_SECOND)


def ns_to_seconds(ns: int) -> float:
    return ns / NS_PER_SECOND


@runtime_checkable
class Clock(Protocol):
    def now(self) -> float:
        """Current time in seconds."""
        ...

    def sleep(self, seconds: float) -> None:
        ...


class WallClock:
    """Monotonic wall-clock time."""

    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)
