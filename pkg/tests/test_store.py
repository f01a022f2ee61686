import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stemeco.datachannel import format as stemfrm
from stemeco.datachannel.store import MeasurementStore, checksum
from stemeco.errors import CorruptRecord, NotFound, StorageFull, StoreIOError
from stemeco.instrument.core import Frame, ProbeCoordinates

from conftest import assert_frames_equal


def make_frame(channel=0, index=0, width=8, height=6, seed=1):
    rng = np.random.default_rng(seed)
    pixels = rng.random((height, width)).astype("<f4")
    return Frame(channel=channel, frame_index=index, width=width, height=height,
                 pixels=pixels, acquired_at=12.5,
                 probe_at_acquisition=ProbeCoordinates(0.25, 0.75))


class TestFormat:
    def test_round_trip_preserves_everything(self):
        frame = make_frame()
        data = stemfrm.encode_frame(frame, {"session": "s", "probe": [0.25, 0.75],
                                            "acquired_at": 12.5})
        record = stemfrm.decode_record(data)
        assert record.channel == 0
        assert (record.width, record.height) == (8, 6)
        assert record.payload == frame.pixel_bytes()
        assert_frames_equal(record.to_frame(), frame)

    def test_magic_and_header_layout(self):
        data = stemfrm.encode_frame(make_frame(), {})
        assert data[:8] == b"STEMFRM1"
        assert int.from_bytes(data[8:12], "big") == 1  # version

    def test_payload_length_must_match_header(self):
        data = bytearray(stemfrm.encode_frame(make_frame(), {}))
        with pytest.raises(CorruptRecord):
            stemfrm.decode_record(bytes(data[:-4]))

    def test_bad_magic_rejected(self):
        data = bytearray(stemfrm.encode_frame(make_frame(), {}))
        data[0] = ord("X")
        with pytest.raises(CorruptRecord):
            stemfrm.decode_record(bytes(data))

    def test_payload_is_width_times_height_times_4(self):
        frame = make_frame(width=512, height=512)
        record = stemfrm.decode_record(stemfrm.encode_frame(frame, {}))
        assert len(record.payload) == 1_048_576


class TestStore:
    def test_one_file_per_frame_and_index_grows(self, tmp_path):
        store = MeasurementStore(tmp_path)
        paths = store.store_frames([make_frame(index=3)], session="run1")
        assert paths == ["run1_0_3.stemfrm"]
        assert (tmp_path / "run1_0_3.stemfrm").exists()
        assert len(store.index()) == 1

    def test_empty_input_stores_nothing(self, tmp_path):
        store = MeasurementStore(tmp_path)
        assert store.store_frames([], session="run1") == []
        assert store.index() == []

    def test_round_trip_is_bit_exact(self, tmp_path):
        store = MeasurementStore(tmp_path)
        frame = make_frame(seed=7)
        (path,) = store.store_frames([frame], session="s")
        assert store.read_record(path).payload == frame.pixel_bytes()

    def test_index_entries_match_files(self, tmp_path):
        store = MeasurementStore(tmp_path)
        store.store_frames([make_frame(index=i, seed=i) for i in range(3)],
                           session="s")
        for entry in store.index():
            data = store.read_bytes(entry.path)
            assert entry.size == len(data)
            assert entry.crc32 == checksum(data)

    def test_every_listed_path_fetchable_every_stored_frame_listed(self, tmp_path):
        store = MeasurementStore(tmp_path)
        frames = [make_frame(channel=i % 2, index=i, seed=i) for i in range(5)]
        stored = store.store_frames(frames, session="s")
        listed = [e.path for e in store.index()]
        assert listed == stored
        for path in listed:
            store.read_record(path)

    def test_duplicate_record_refused(self, tmp_path):
        store = MeasurementStore(tmp_path)
        store.store_frames([make_frame(index=1)], session="s")
        with pytest.raises(StoreIOError):
            store.store_frames([make_frame(index=1)], session="s")

    def test_missing_record_not_found(self, tmp_path):
        store = MeasurementStore(tmp_path)
        with pytest.raises(NotFound):
            store.read_bytes("nothing.stemfrm")

    def test_path_escape_refused(self, tmp_path):
        store = MeasurementStore(tmp_path)
        with pytest.raises(NotFound):
            store.read_bytes("../index.tsv")

    def test_write_failure_classified(self, tmp_path, monkeypatch):
        store = MeasurementStore(tmp_path)

        def explode(self, data):
            raise OSError(28, "No space left on device")

        monkeypatch.setattr("pathlib.Path.write_bytes", explode)
        with pytest.raises(StorageFull):
            store.store_frames([make_frame()], session="s")

        def explode_other(self, data):
            raise OSError(5, "Input/output error")

        monkeypatch.setattr("pathlib.Path.write_bytes", explode_other)
        with pytest.raises(StoreIOError):
            store.store_frames([make_frame(index=9)], session="s")


@given(width=st.integers(1, 24), height=st.integers(1, 24),
       channel=st.integers(0, 3), index=st.integers(0, 2**32),
       seed=st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_store_fetch_round_trip_property(tmp_path_factory, width, height,
                                         channel, index, seed):
    rng = np.random.default_rng(seed)
    frame = Frame(channel=channel, frame_index=index, width=width, height=height,
                  pixels=rng.random((height, width)).astype("<f4"),
                  acquired_at=float(seed % 1000))
    store = MeasurementStore(tmp_path_factory.mktemp("store"))
    (path,) = store.store_frames([frame], session="fuzz")
    record = store.read_record(path)
    assert record.payload == frame.pixel_bytes()
    assert record.frame_index == index
