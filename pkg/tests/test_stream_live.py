import threading

import numpy as np
import pytest

from src.config import Geometry
from src.packet import PacketKind, PacketMeta
from src.router import PacketRouter
from src.stream import Reassembler, SequenceCounter, VideoEncoder, audio_packetize
from src.stream.live import UdpReceiver, UdpSender

from .conftest import gradient_frame


def _loopback(packets, expected):
    results = {}
    with UdpReceiver(port=0, host="127.0.0.1", timeout=2.0) as receiver:
        reassembler = Reassembler(router=PacketRouter(datagram_mode=True))
        thread = threading.Thread(
            target=lambda: results.update(result=receiver.receive(reassembler, max_packets=expected))
        )
        thread.start()
        with UdpSender("127.0.0.1", receiver.port) as sender:
            report = sender.send(packets)
        thread.join(timeout=10)
    return report, results["result"]


def test_loopback_frame_and_audio():
    counter = SequenceCounter()
    frame = gradient_frame()
    packets = list(VideoEncoder().encode(frame, counter).packets)
    pcm = bytes(range(200)) * 8
    packets += audio_packetize(pcm, counter)

    report, result = _loopback(packets, len(packets))
    assert report.packets == len(packets)
    assert result.stats.lost == 0
    assert result.completeness == 1.0
    assert result.audio == pcm

    offline = Reassembler().feed(packets[:120]).finish()
    assert np.array_equal(result.frames[0].pixels, offline.frames[0].pixels)


def test_producer_errors_reach_the_caller():
    def broken():
        yield PacketMeta(PacketKind.AUDIO, 0), b"\x00" * 800
        raise RuntimeError("codec falhou")

    with UdpReceiver(port=0, host="127.0.0.1", timeout=0.2) as receiver:
        with UdpSender("127.0.0.1", receiver.port, queue_size=1) as sender:
            with pytest.raises(RuntimeError, match="codec falhou"):
                sender.send(broken())
        assert len(list(receiver.datagrams(max_packets=5))) == 1


def test_receiver_stops_when_idle():
    with UdpReceiver(port=0, host="127.0.0.1", timeout=0.1) as receiver:
        result = receiver.receive(Reassembler(geometry=Geometry(), router=PacketRouter(datagram_mode=True)))
    assert result.stats.packets_seen == 0
    assert result.frames == []
