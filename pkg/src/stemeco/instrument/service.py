"""The instrument task object published over the control channel.

Exposes exactly the three steering tasks. Results are wire-safe
documents (frames carry their pixel payload as bytes). When a
measurement store is attached, every scan's frames are persisted there
as a side effect, which is what makes them appear on the data channel
without any manual transfer step.
"""

from __future__ import annotations

import logging

from stemeco.instrument.core import Instrument

logger = logging.getLogger(__name__)


class InstrumentService:
    """RPC surface for one instrument; methods mirror the task functions."""

    def __init__(self, instrument: Instrument, store=None, session: str = "scan"):
        self._instrument = instrument
        self._store = store
        self._session = session

    def scan_status(self) -> bool:
        return self._instrument.scan_status()

    def scan_channel(self, ch: int, num_frames: int) -> list[dict]:
        frames = self._instrument.scan_channel(ch, num_frames)
        if self._store is not None:
            paths = self._store.store_frames(frames, session=self._session)
            logger.debug("stored %d frame(s): %s", len(frames), paths)
        return [frame.to_wire() for frame in frames]

    def probe_position(self, x: float, y: float) -> dict:
        return self._instrument.probe_position(x, y).to_wire()
