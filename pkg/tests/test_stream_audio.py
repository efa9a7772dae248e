import pytest

from src.errors import MalformedFrameError
from src.packet import PacketKind
from src.stream import AudioPacketizer, AudioPayload, SequenceCounter, audio_packetize, iter_audio_packets
from src.stream.audio import PACKETS_PER_SECOND


def test_one_second_is_ten_packets():
    pcm = bytes(i % 256 for i in range(8000))
    packets = audio_packetize(pcm)
    assert PACKETS_PER_SECOND == 10
    assert len(packets) == 10
    assert [m.seq for m, _ in packets] == list(range(10))
    assert all(m.kind is PacketKind.AUDIO for m, _ in packets)
    assert b"".join(p.to_bytes() for _, p in packets) == pcm


def test_partial_chunk_is_zero_padded_at_end():
    packets = audio_packetize(b"\x80" * 799)
    assert len(packets) == 1
    payload = packets[0][1]
    assert payload.pad_length == 1
    assert payload.samples[-1] == 0
    assert len(payload.to_bytes()) == 800


def test_packetizer_holds_partial_chunk():
    packetizer = AudioPacketizer()
    assert packetizer.feed(b"\x01" * 500) == []
    assert packetizer.pending == 500
    packets = packetizer.feed(b"\x02" * 1200)
    assert len(packets) == 2
    assert packetizer.pending == 100
    assert packets[0][1].samples == b"\x01" * 500 + b"\x02" * 300
    assert packetizer.flush()[1].pad_length == 700
    assert packetizer.flush() is None


def test_shared_counter_continues_sequence():
    counter = SequenceCounter(254)
    packets = audio_packetize(b"\x00" * 2400, counter)
    assert [m.seq for m, _ in packets] == [254, 255, 0]
    assert counter.next() == 1


def test_streaming_matches_one_shot():
    pcm = bytes((i * 13) % 256 for i in range(5000))
    sizes = [1, 799, 800, 801, 1234]
    chunks, start = [], 0
    for size in sizes:
        chunks.append(pcm[start:start + size])
        start += size
    chunks.append(pcm[start:])
    streamed = [(m, p.samples) for m, p in iter_audio_packets(chunks)]
    assert streamed == [(m, p.samples) for m, p in audio_packetize(pcm)]


def test_payload_length_is_enforced():
    with pytest.raises(MalformedFrameError):
        AudioPayload(samples=b"\x00" * 799)
    assert AudioPayload.from_bytes(b"\x00" * 800).pad_length == 0
