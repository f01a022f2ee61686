from stemeco.datachannel.client import (
    FetchedRecord,
    ShareHandle,
    mount_share,
)
from stemeco.datachannel.format import (
    MeasurementRecord,
    decode_record,
    encode_frame,
    encode_record,
)
from stemeco.datachannel.server import DEFAULT_SHARE_PORT, ShareServer
from stemeco.datachannel.store import IndexEntry, MeasurementStore, checksum

__all__ = [
    "DEFAULT_SHARE_PORT",
    "FetchedRecord",
    "IndexEntry",
    "MeasurementRecord",
    "MeasurementStore",
    "ShareHandle",
    "ShareServer",
    "checksum",
    "decode_record",
    "encode_frame",
    "encode_record",
    "mount_share",
]
