"""Virtual STEM instrument.

Implements the three steering tasks with the same observable semantics
as the microscope-side task functions: ``scan_status`` reports whether a
scan is playing, ``scan_channel`` enables one channel, scans for
``frame_time * num_frames + ct`` on the instrument's clock and returns
the grabbed frames, and ``probe_position`` moves (or unsets) the focused
probe.

State is guarded by a mutex that is never held across a sleep, so
observers always see fully applied commands while a long scan is in
flight, and a second scan request fails fast with Busy instead of
queueing. The handle is safe to share across threads of control.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from stemeco.clock import Clock, WallClock
from stemeco.errors import (
    BufferExceeded, Busy, InvalidChannel, OutOfRange, SchemaError,
)
from stemeco.instrument import synth

DEFAULT_CHANNEL_COUNT = 2
DEFAULT_BUFFER_CAPACITY = 16
DEFAULT_SETTLE_SECONDS = 1.0  # the task code's hard-coded ct margin


@dataclass(frozen=True)
class ProbeCoordinates:
    """Fractional scan-field position; both coordinates in [0, 1]."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise OutOfRange(f"probe coordinates must be finite: ({self.x}, {self.y})")
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise OutOfRange(f"probe coordinates outside [0,1]: ({self.x}, {self.y})")


@dataclass(frozen=True)
class ScanParameters:
    width: int = 512
    height: int = 512
    dwell_time_us: float = 1.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SchemaError(f"scan size must be >= 1x1: {self.width}x{self.height}")
        if not (math.isfinite(self.dwell_time_us) and self.dwell_time_us > 0):
            raise SchemaError(f"dwell time must be > 0: {self.dwell_time_us}")

    @property
    def frame_time(self) -> float:
        """Seconds to raster one full frame."""
        return calculate_frame_time(self)


def calculate_frame_time(params: ScanParameters) -> float:
    """width x height x dwell time, in seconds."""
    return params.width * params.height * params.dwell_time_us * 1e-6


@dataclass(frozen=True)
class GaussianFeature:
    x: float
    y: float
    amplitude: float
    width: float


@dataclass(frozen=True)
class SpecimenModel:
    features: tuple[GaussianFeature, ...] = ()
    noise_sigma: float = 0.0


DEFAULT_SPECIMEN = SpecimenModel(
    features=(
        GaussianFeature(x=0.3, y=0.4, amplitude=1.0, width=0.08),
        GaussianFeature(x=0.7, y=0.6, amplitude=1.5, width=0.05),
        GaussianFeature(x=0.5, y=0.2, amplitude=0.8, width=0.10),
    ),
    noise_sigma=0.02,
)


@dataclass
class Frame:
    """One scanned image from one detector channel."""

    channel: int
    frame_index: int
    width: int
    height: int
    pixels: np.ndarray  # (height, width) float32
    acquired_at: float
    probe_at_acquisition: ProbeCoordinates | None = None

    def pixel_bytes(self) -> bytes:
        """Row-major little-endian float32 payload."""
        return np.ascontiguousarray(self.pixels, dtype="<f4").tobytes()

    def to_wire(self) -> dict:
        probe = self.probe_at_acquisition
        return {
            "channel": self.channel,
            "frame_index": self.frame_index,
            "width": self.width,
            "height": self.height,
            "pixels": self.pixel_bytes(),
            "acquired_at": self.acquired_at,
            "probe": None if probe is None else [probe.x, probe.y],
        }

    @staticmethod
    def from_wire(doc: dict) -> "Frame":
        width, height = int(doc["width"]), int(doc["height"])
        pixels = np.frombuffer(doc["pixels"], dtype="<f4").reshape(height, width)
        probe = doc.get("probe")
        return Frame(
            channel=int(doc["channel"]),
            frame_index=int(doc["frame_index"]),
            width=width,
            height=height,
            pixels=pixels,
            acquired_at=float(doc["acquired_at"]),
            probe_at_acquisition=None if probe is None else
            ProbeCoordinates(float(probe[0]), float(probe[1])),
        )


@dataclass
class PositionReport:
    """Previous and new probe state, mirroring the task's two status lines."""

    previous: ProbeCoordinates | None
    new: ProbeCoordinates | None

    def to_wire(self) -> dict:
        return {
            "previous": None if self.previous is None else [self.previous.x, self.previous.y],
            "new": None if self.new is None else [self.new.x, self.new.y],
        }

    @staticmethod
    def from_wire(doc: dict) -> "PositionReport":
        prev, new = doc.get("previous"), doc.get("new")
        return PositionReport(
            previous=None if prev is None else ProbeCoordinates(*map(float, prev)),
            new=None if new is None else ProbeCoordinates(*map(float, new)),
        )


@dataclass
class InstrumentConfig:
    channel_count: int = DEFAULT_CHANNEL_COUNT
    scan_params: ScanParameters = field(default_factory=ScanParameters)
    settle_seconds: float = DEFAULT_SETTLE_SECONDS
    buffer_capacity: int = DEFAULT_BUFFER_CAPACITY
    rng_seed: int = 42
    specimen: SpecimenModel = field(default_factory=lambda: DEFAULT_SPECIMEN)
    # beam parked at field center unless configured otherwise
    initial_probe: tuple[float, float] | None = (0.5, 0.5)

    def __post_init__(self):
        if self.channel_count < 1:
            raise SchemaError(f"channel count must be >= 1: {self.channel_count}")
        if self.buffer_capacity < 1:
            raise SchemaError(f"buffer capacity must be >= 1: {self.buffer_capacity}")
        if self.settle_seconds < 0:
            raise SchemaError(f"settle time must be >= 0: {self.settle_seconds}")


class Instrument:
    """Simulated microscope holding probe, channel and frame-buffer state."""

    def __init__(self, config: InstrumentConfig | None = None,
                 clock: Clock | None = None):
        self.config = config or InstrumentConfig()
        self.clock = clock or WallClock()
        self._lock = threading.Lock()
        self._scanning = False
        self._enabled_channels: set[int] = {0}
        self._probe: ProbeCoordinates | None = (
            None if self.config.initial_probe is None
            else ProbeCoordinates(*self.config.initial_probe))
        self._buffer: deque[Frame] = deque(maxlen=self.config.buffer_capacity)
        self._next_frame_index = 0

    # -- observers --

    def scan_status(self) -> bool:
        with self._lock:
            return self._scanning

    @property
    def probe(self) -> ProbeCoordinates | None:
        with self._lock:
            return self._probe

    @property
    def enabled_channels(self) -> set[int]:
        with self._lock:
            return set(self._enabled_channels)

    def buffered_frames(self) -> list[Frame]:
        with self._lock:
            return list(self._buffer)

    # -- steering tasks --

    def scan_channel(self, ch: int, num_frames: int) -> list[Frame]:
        params = self.config.scan_params
        with self._lock:
            if not isinstance(ch, int) or isinstance(ch, bool):
                raise InvalidChannel(f"channel must be an integer: {ch!r}")
            if not 0 <= ch < self.config.channel_count:
                raise InvalidChannel(
                    f"channel {ch} outside 0..{self.config.channel_count - 1}")
            if not isinstance(num_frames, int) or isinstance(num_frames, bool) or num_frames < 1:
                raise BufferExceeded(f"num_frames must be a positive integer: {num_frames!r}")
            if num_frames > self.config.buffer_capacity:
                raise BufferExceeded(
                    f"num_frames {num_frames} exceeds buffer capacity "
                    f"{self.config.buffer_capacity}")
            if self._scanning:
                raise Busy("a scan is already in progress")
            self._scanning = True
            self._enabled_channels = {ch}
            start = self.clock.now()

        frame_time = calculate_frame_time(params)
        try:
            # ct settle margin on top of the raster time, as in the task code
            self.clock.sleep(frame_time * num_frames + self.config.settle_seconds)
        except BaseException:
            with self._lock:
                self._scanning = False
            raise
        with self._lock:
            frames = [self._synthesize_locked(ch, start, k, frame_time)
                      for k in range(num_frames)]
            self._buffer.extend(frames)
            self._scanning = False
            recent = [f for f in self._buffer if f.channel == ch]
        return recent[-num_frames:]

    def _synthesize_locked(self, ch: int, scan_start: float, k: int,
                           frame_time: float) -> Frame:
        params = self.config.scan_params
        index = self._next_frame_index
        self._next_frame_index += 1
        pixels = synth.render_pixels(
            self.config.specimen, params.width, params.height, self._probe,
            self.config.rng_seed, ch, index)
        return Frame(
            channel=ch,
            frame_index=index,
            width=params.width,
            height=params.height,
            pixels=pixels,
            acquired_at=scan_start + (k + 1) * frame_time,
            probe_at_acquisition=self._probe,
        )

    def probe_position(self, x: float, y: float) -> PositionReport:
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise OutOfRange(f"coordinates must be finite: ({x}, {y})")
        # (0, 0) is the task's sentinel for "no focused probe"
        new = None if (x == 0.0 and y == 0.0) else ProbeCoordinates(x, y)
        with self._lock:
            report = PositionReport(previous=self._probe, new=new)
            self._probe = new
        return report

    def synthesize_frame(self, channel: int, frame_index: int) -> Frame:
        """Render a frame without scanning (detector stand-in; pure)."""
        with self._lock:
            if not 0 <= channel < self.config.channel_count:
                raise InvalidChannel(
                    f"channel {channel} outside 0..{self.config.channel_count - 1}")
            params = self.config.scan_params
            pixels = synth.render_pixels(
                self.config.specimen, params.width, params.height, self._probe,
                self.config.rng_seed, channel, frame_index)
            return Frame(
                channel=channel,
                frame_index=frame_index,
                width=params.width,
                height=params.height,
                pixels=pixels,
                acquired_at=self.clock.now(),
                probe_at_acquisition=self._probe,
            )
