"""STEMFRM1: the on-disk measurement record format.

Self-contained binary layout, one frame per file. Header integers are
big-endian; pixel intensities are 32-bit little-endian floats, row
major. The metadata document is UTF-8 JSON carrying acquisition context
(probe position, timestamps, scan parameters, session).

    offset  size  field
    0       8     magic "STEMFRM1"
    8       4     format version (1)
    12      4     channel
    16      8     frame index
    24      4     width (pixels)
    28      4     height (pixels)
    32      4     element type (1 = float32 little-endian)
    36      4     metadata length M
    40      M     metadata JSON
    40+M    W*H*4 pixel payload
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from stemeco.errors import CorruptRecord
from stemeco.instrument.core import Frame, ProbeCoordinates

MAGIC = b"STEMFRM1"
VERSION = 1
ELEMENT_F32LE = 1
_FIXED = struct.Struct(">IIQIIII")  # version, channel, frame_index, w, h, elem, mlen
HEADER_SIZE = len(MAGIC) + _FIXED.size


@dataclass
class MeasurementRecord:
    """Decoded record: header fields plus raw pixel payload."""

    channel: int
    frame_index: int
    width: int
    height: int
    metadata: dict = field(default_factory=dict)
    payload: bytes = b""

    @property
    def payload_length(self) -> int:
        return self.width * self.height * 4

    def to_frame(self) -> Frame:
        pixels = np.frombuffer(self.payload, dtype="<f4").reshape(
            self.height, self.width)
        probe = self.metadata.get("probe")
        return Frame(
            channel=self.channel,
            frame_index=self.frame_index,
            width=self.width,
            height=self.height,
            pixels=pixels,
            acquired_at=float(self.metadata.get("acquired_at", 0.0)),
            probe_at_acquisition=None if probe is None else
            ProbeCoordinates(float(probe[0]), float(probe[1])),
        )


def frame_metadata(frame: Frame, session: str, stored_at: float,
                   scan_params=None) -> dict:
    probe = frame.probe_at_acquisition
    doc = {
        "session": session,
        "acquired_at": frame.acquired_at,
        "stored_at": stored_at,
        "probe": None if probe is None else [probe.x, probe.y],
    }
    if scan_params is not None:
        doc["scan"] = {"width": scan_params.width, "height": scan_params.height,
                       "dwell_time_us": scan_params.dwell_time_us}
    return doc


def encode_record(record: MeasurementRecord) -> bytes:
    if len(record.payload) != record.payload_length:
        raise CorruptRecord(
            f"payload {len(record.payload)} bytes, header implies "
            f"{record.payload_length}")
    metadata = json.dumps(record.metadata, allow_nan=False,
                          separators=(",", ":")).encode("utf-8")
    fixed = _FIXED.pack(VERSION, record.channel, record.frame_index,
                        record.width, record.height, ELEMENT_F32LE,
                        len(metadata))
    return MAGIC + fixed + metadata + record.payload


def encode_frame(frame: Frame, metadata: dict) -> bytes:
    return encode_record(MeasurementRecord(
        channel=frame.channel,
        frame_index=frame.frame_index,
        width=frame.width,
        height=frame.height,
        metadata=metadata,
        payload=frame.pixel_bytes(),
    ))


def decode_record(data: bytes) -> MeasurementRecord:
    if len(data) < HEADER_SIZE:
        raise CorruptRecord(f"record shorter than header: {len(data)} bytes")
    if data[:len(MAGIC)] != MAGIC:
        raise CorruptRecord(f"bad magic: {data[:len(MAGIC)]!r}")
    version, channel, frame_index, width, height, element, mlen = _FIXED.unpack_from(
        data, len(MAGIC))
    if version != VERSION:
        raise CorruptRecord(f"unsupported format version {version}")
    if element != ELEMENT_F32LE:
        raise CorruptRecord(f"unsupported element type {element}")
    body = data[HEADER_SIZE:]
    if len(body) < mlen:
        raise CorruptRecord("truncated metadata")
    try:
        metadata = json.loads(body[:mlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptRecord(f"bad metadata document: {exc}") from None
    payload = body[mlen:]
    expected = width * height * 4
    if len(payload) != expected:
        raise CorruptRecord(
            f"payload {len(payload)} bytes, header implies {expected}")
    return MeasurementRecord(
        channel=channel, frame_index=frame_index, width=width, height=height,
        metadata=metadata, payload=bytes(payload))
