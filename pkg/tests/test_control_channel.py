"""Control channel over the real loopback stack."""

import threading

import pytest

from stemeco.control import codec
from stemeco.control.client import RemoteObject, invoke
from stemeco.control.server import ControlServer, ObjectRegistry
from stemeco.control.uri import ObjectUri
from stemeco.errors import (
    ApplicationError, BadArguments, BindError, Busy, ConnectionClosed,
    ConnectionRefused, InvalidChannel, RemoteFrameTooLarge, Timeout,
    UnknownMethod, UnknownObject,
)
from stemeco.instrument.core import Instrument
from stemeco.instrument.service import InstrumentService
from stemeco.netem.transport import RealTransport

from conftest import quick_config


class Echo:
    def echo(self, value):
        return value

    def boom(self):
        raise RuntimeError("kaboom")

    def big(self, n):
        return b"\x00" * n

    def _hidden(self):
        return "secret"


@pytest.fixture
def transport():
    return RealTransport()


@pytest.fixture
def server(transport):
    registry = ObjectRegistry()
    registry.register("echo", Echo())
    instrument = Instrument(quick_config(settle_seconds=0.01))
    registry.register("swift_server", InstrumentService(instrument))
    with ControlServer(transport, registry, "127.0.0.1", 0) as srv:
        yield srv


def uri_for(server, objectid="swift_server"):
    return ObjectUri(objectid, "127.0.0.1", server.port)


class TestInvoke:
    def test_scan_status_round_trip(self, server, transport):
        assert invoke(uri_for(server), "scan_status", transport=transport) is False

    def test_probe_position_returns_report(self, server, transport):
        report = invoke(uri_for(server), "probe_position", [0.2, 0.8],
                        transport=transport)
        assert report == {"previous": [0.5, 0.5], "new": [0.2, 0.8]}

    def test_scan_channel_returns_frames_inline(self, server, transport):
        frames = invoke(uri_for(server), "scan_channel", [0, 2],
                        transport=transport)
        assert len(frames) == 2
        assert all(len(f["pixels"]) == 16 * 16 * 4 for f in frames)

    def test_echo_handles_arbitrary_values(self, server, transport):
        value = {"a": [1, 2.5, None, True], "blob": b"\x01\x02"}
        assert invoke(uri_for(server, "echo"), "echo", [value],
                      transport=transport) == value

    def test_remote_proxy(self, server, transport):
        remote = RemoteObject(uri_for(server), transport)
        assert remote.scan_status() is False


class TestRemoteErrors:
    def test_unknown_object(self, server, transport):
        with pytest.raises(UnknownObject):
            invoke(ObjectUri("ghost", "127.0.0.1", server.port), "x",
                   transport=transport)

    def test_unknown_method(self, server, transport):
        with pytest.raises(UnknownMethod):
            invoke(uri_for(server), "no_such_method", transport=transport)

    def test_private_methods_not_advertised(self, server, transport):
        with pytest.raises(UnknownMethod):
            invoke(uri_for(server, "echo"), "_hidden", transport=transport)

    def test_bad_argument_count(self, server, transport):
        with pytest.raises(BadArguments):
            invoke(uri_for(server), "probe_position", [0.1], transport=transport)

    def test_instrument_error_resurfaces_with_its_type(self, server, transport):
        with pytest.raises(InvalidChannel):
            invoke(uri_for(server), "scan_channel", [99, 1], transport=transport)

    def test_unexpected_server_exception_becomes_application_error(
            self, server, transport):
        with pytest.raises(ApplicationError, match="kaboom"):
            invoke(uri_for(server, "echo"), "boom", transport=transport)

    def test_busy_surfaces_through_the_wire(self, transport):
        registry = ObjectRegistry()
        instrument = Instrument(quick_config(settle_seconds=0.3))
        registry.register("swift_server", InstrumentService(instrument))
        with ControlServer(transport, registry, "127.0.0.1", 0) as srv:
            uri = uri_for(srv)
            results = []

            def long_scan():
                results.append(invoke(uri, "scan_channel", [0, 1],
                                      transport=transport, timeout=10))

            scanner = threading.Thread(target=long_scan)
            scanner.start()
            deadline_hit = None
            import time
            time.sleep(0.1)
            with pytest.raises(Busy):
                invoke(uri, "scan_channel", [1, 1], transport=transport)
            scanner.join()
            assert len(results) == 1

    def test_connection_refused_when_no_server(self, transport):
        with pytest.raises(ConnectionRefused):
            invoke(ObjectUri("x", "127.0.0.1", 1), "m", transport=transport,
                   timeout=2)

    def test_oversized_response_reported_in_band(self, transport):
        registry = ObjectRegistry()
        registry.register("echo", Echo())
        with ControlServer(transport, registry, "127.0.0.1", 0,
                           max_body=4096) as srv:
            with pytest.raises(RemoteFrameTooLarge):
                invoke(ObjectUri("echo", "127.0.0.1", srv.port), "big", [100_000],
                       transport=transport)


class TestProtocolRobustness:
    def test_garbage_bytes_close_the_connection(self, server, transport):
        stream = transport.connect("127.0.0.1", server.port)
        stream.send_all(b"\x00\x00\x00\x05notjs")
        with pytest.raises((ConnectionClosed, Timeout)):
            stream.recv_exactly(4, timeout=2)
        stream.close()
        # server survives and keeps answering
        assert invoke(uri_for(server), "scan_status", transport=transport) is False

    def test_oversized_request_frame_closes_the_connection(self, transport):
        registry = ObjectRegistry()
        registry.register("echo", Echo())
        with ControlServer(transport, registry, "127.0.0.1", 0,
                           max_body=1024) as srv:
            stream = transport.connect("127.0.0.1", srv.port)
            stream.send_all((1 << 20).to_bytes(4, "big"))
            with pytest.raises((ConnectionClosed, Timeout)):
                stream.recv_exactly(4, timeout=2)
            stream.close()

    def test_pipelined_requests_pair_by_id(self, server, transport):
        stream = transport.connect("127.0.0.1", server.port)
        n = 8
        for i in range(n):
            codec.write_message(stream, codec.ControlRequest(
                request_id=1000 + i, objectid="echo", method="echo", args=[i]))
        seen = {}
        for _ in range(n):
            resp = codec.read_message(stream, timeout=5)
            assert not resp.is_error
            seen[resp.request_id] = resp.ok
        stream.close()
        assert seen == {1000 + i: i for i in range(n)}

    def test_two_simultaneous_clients_get_consistent_answers(self, transport):
        registry = ObjectRegistry()
        instrument = Instrument(quick_config(settle_seconds=0.25))
        registry.register("swift_server", InstrumentService(instrument))
        with ControlServer(transport, registry, "127.0.0.1", 0) as srv:
            uri = uri_for(srv)
            polled = []

            def poller():
                import time
                time.sleep(0.1)
                polled.append(invoke(uri, "scan_status", transport=transport))

            watcher = threading.Thread(target=poller)
            watcher.start()
            frames = invoke(uri, "scan_channel", [0, 1], transport=transport,
                            timeout=10)
            watcher.join()
            assert polled == [True]
            assert len(frames) == 1
            assert invoke(uri, "scan_status", transport=transport) is False


class TestBind:
    def test_port_collision_raises_bind_error(self, transport):
        registry = ObjectRegistry()
        registry.register("echo", Echo())
        with ControlServer(transport, registry, "127.0.0.1", 0) as srv:
            with pytest.raises(BindError):
                transport.listen("127.0.0.1", srv.port, lambda s: None)
