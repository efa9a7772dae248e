import numpy as np
import pytest

from src.config import Config, WireConfig
from src.errors import ChecksumError, MalformedFrameError, NotOursError, PayloadTooLargeError
from src.packet import (
    CRC32_TABLE,
    ETH_HDR_LEN,
    FCS_LEN,
    HEADERS_LEN,
    IFG_CYCLES,
    PREAMBLE_LEN,
    SECTION_TABLE,
    PacketKind,
    PacketMeta,
    build_datagram,
    build_frame,
    crc32,
    crc32_final,
    crc32_init,
    crc32_update,
    crc32_update_bytes,
    crc32_value,
    dissect_frame,
    ipv4_checksum,
    parse_datagram,
    parse_frame,
    read_capture,
    read_frames,
    read_hex_csv,
    strip_preamble,
    wire_cycles,
    wire_seconds,
    write_capture,
    write_hex_csv,
)


def bitwise_crc32(data: bytes, init: int = 0xFFFFFFFF, xor_out: int = 0xFFFFFFFF) -> int:
    crc = init
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ 0xEDB88320 if crc & 1 else crc >> 1
    return crc ^ xor_out


def table_crc32(data: bytes) -> bytes:
    """FCS calculado byte a byte pela tabela."""
    state = crc32_init()
    for byte in data:
        state = crc32_update(state, byte)
    return crc32_final(state)


def _refcs(frame: bytes) -> bytes:
    """Recalcula o FCS depois de editar um quadro sem preâmbulo."""
    body = frame[:-FCS_LEN]
    return body + crc32(body).to_bytes(4, "little")


@pytest.fixture
def wire() -> WireConfig:
    return WireConfig(include_preamble=False)


def test_crc_check_value():
    assert crc32(b"123456789") == 0xCBF43926
    assert crc32(b"") == 0


def test_crc_matches_bitwise_reference():
    rng = np.random.default_rng(41)
    for _ in range(200):
        data = rng.integers(0, 256, size=int(rng.integers(0, 64)), dtype=np.uint8).tobytes()
        assert crc32(data) == bitwise_crc32(data)


def test_crc_per_byte_update_equals_bulk():
    data = bytes(range(256)) * 3
    state = crc32_init()
    for byte in data:
        state = crc32_update(state, byte)
    bulk = crc32_update_bytes(crc32_update_bytes(crc32_init(), data[:100]), data[100:])
    assert crc32_value(state) == crc32_value(bulk) == bitwise_crc32(data)
    assert crc32_final(state) == bitwise_crc32(data).to_bytes(4, "little")


def test_crc_table_entries_match_bitwise_register():
    assert len(CRC32_TABLE) == 256
    for byte in range(256):
        assert CRC32_TABLE[byte] == bitwise_crc32(bytes([byte]), init=0, xor_out=0)


def test_ipv4_checksum_known_header():
    header = bytes.fromhex("450000730000400040110000c0a80001c0a800c7")
    assert ipv4_checksum(header) == 0xB861
    fixed = header[:10] + (0xB861).to_bytes(2, "big") + header[12:]
    assert ipv4_checksum(fixed) == 0


def test_section_layout(wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 7), b"\xAB" * 100, wire).data
    assert len(frame) == HEADERS_LEN + 2 + 100 + FCS_LEN
    assert frame[12:14] == b"\x08\x00"
    assert frame[ETH_HDR_LEN] == 0x45
    assert frame[ETH_HDR_LEN + 6:ETH_HDR_LEN + 8] == b"\x40\x00"
    assert frame[ETH_HDR_LEN + 9] == 17
    assert frame[HEADERS_LEN:HEADERS_LEN + 2] == b"\x01\x07"
    assert int.from_bytes(frame[36:38], "big") == Config.DST_PORT
    assert frame[-FCS_LEN:] == crc32(frame[:-FCS_LEN]).to_bytes(4, "little")


def test_section_table_sizes():
    sizes = {name: size for name, size, _ in SECTION_TABLE}
    assert sizes == {
        "preamble": 8, "ethernet": 14, "ipv4": 20, "udp": 8,
        "kind": 1, "seq": 1, "data": 1470, "fcs": 4, "ifg": 0,
    }


def test_preamble_and_limits():
    with_preamble = build_frame(PacketMeta(PacketKind.AUDIO, 0), b"\x00" * Config.MAX_PAYLOAD)
    assert with_preamble.has_preamble
    assert with_preamble.data[:PREAMBLE_LEN] == Config.PREAMBLE
    assert len(with_preamble.ethernet) == Config.MAX_FRAME
    assert len(with_preamble) == Config.MAX_FRAME + PREAMBLE_LEN

    stripped, had = strip_preamble(with_preamble.data)
    assert had and stripped == with_preamble.ethernet


def test_short_frames_are_padded(wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 1), b"", wire).data
    assert len(frame) == Config.MIN_FRAME
    meta, payload = parse_frame(frame, wire)
    assert payload == b""
    assert meta == PacketMeta(PacketKind.VIDEO, 1)


def test_payload_too_large():
    with pytest.raises(PayloadTooLargeError):
        build_frame(PacketMeta(PacketKind.VIDEO, 0), b"\x00" * (Config.MAX_PAYLOAD + 1))
    with pytest.raises(PayloadTooLargeError):
        build_datagram(PacketMeta(PacketKind.VIDEO, 0), b"\x00" * (Config.MAX_PAYLOAD + 1))


@pytest.mark.parametrize("length", [0, 1, 17, 18, 19, 100, 1469, 1470])
def test_parse_inverts_build(length, wire):
    payload = bytes((i * 7) % 256 for i in range(length))
    meta = PacketMeta(PacketKind.AUDIO, 255)
    for cfg in (wire, WireConfig()):
        assert parse_frame(build_frame(meta, payload, cfg).data, cfg) == (meta, payload)


def test_parse_rejects_corruption(wire):
    frame = bytearray(build_frame(PacketMeta(PacketKind.VIDEO, 3), b"dados", wire).data)
    frame[HEADERS_LEN + 3] ^= 0x10
    with pytest.raises(ChecksumError):
        parse_frame(bytes(frame), wire)


def test_parse_rejects_bad_ip_checksum(wire):
    frame = bytearray(build_frame(PacketMeta(PacketKind.VIDEO, 3), b"dados", wire).data)
    frame[ETH_HDR_LEN + 8] ^= 0x01  # TTL
    with pytest.raises(ChecksumError, match="IPv4"):
        parse_frame(_refcs(bytes(frame)), wire)


def test_parse_rejects_foreign_traffic(wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 3), b"dados", wire).data
    other_port = WireConfig(include_preamble=False, dst_port=6000)
    with pytest.raises(NotOursError):
        parse_frame(frame, other_port)

    arp = bytearray(frame)
    arp[12:14] = b"\x08\x06"
    with pytest.raises(NotOursError):
        parse_frame(_refcs(bytes(arp)), wire)


def test_parse_rejects_bad_sizes_and_kind(wire):
    with pytest.raises(MalformedFrameError):
        parse_frame(b"\x00" * 40, wire)
    with pytest.raises(MalformedFrameError):
        parse_frame(b"\x00" * (Config.MAX_FRAME + 1), wire)

    frame = bytearray(build_frame(PacketMeta(PacketKind.VIDEO, 3), b"dados", wire).data)
    frame[HEADERS_LEN] = 0x07
    with pytest.raises(MalformedFrameError):
        parse_frame(_refcs(bytes(frame)), wire)


def test_datagram_round_trip():
    meta = PacketMeta(PacketKind.VIDEO, 42)
    datagram = build_datagram(meta, b"\x05abc")
    assert datagram == b"\x01\x2a\x05abc"
    assert parse_datagram(datagram) == (meta, b"\x05abc")
    with pytest.raises(MalformedFrameError):
        parse_datagram(b"\x01")
    with pytest.raises(MalformedFrameError):
        parse_datagram(b"\x09\x00")


def test_meta_sequence_range():
    with pytest.raises(ValueError):
        PacketMeta(PacketKind.AUDIO, 256)


def test_wire_timing():
    assert wire_cycles(Config.MAX_PAYLOAD) == (Config.MAX_FRAME + PREAMBLE_LEN) * 4 + IFG_CYCLES
    assert wire_cycles(0, include_preamble=False) == Config.MIN_FRAME * 4 + IFG_CYCLES
    assert wire_seconds(0, include_preamble=False) == pytest.approx(304 / 50e6)


def test_dissect_valid_frame(wire):
    payload = bytes([9]) + b"\x00" * 8
    info = dissect_frame(build_frame(PacketMeta(PacketKind.VIDEO, 77), payload, wire).data, wire)
    assert info.valid
    assert info.fcs_ok and info.ip_checksum_ok
    assert (info.kind, info.seq, info.position, info.payload_len) == ("video", 77, 9, 9)
    assert info.src_ip == "192.168.1.1" and info.dst_ip == "192.168.1.2"
    assert info.dst_port == Config.DST_PORT
    assert info.to_dict()["valid"] is True


def test_dissect_agrees_with_parser(wire):
    frame = bytearray(build_frame(PacketMeta(PacketKind.AUDIO, 1), b"\x80" * 800, wire).data)
    frame[50] ^= 0xFF
    info = dissect_frame(bytes(frame), wire)
    assert not info.valid
    assert info.fcs_ok is False
    assert info.error.startswith("ChecksumError")
    assert dissect_frame(b"\x01\x02", wire).length == 2


def test_capture_round_trip(tmp_path, wire):
    frames = [build_frame(PacketMeta(PacketKind.VIDEO, i), bytes([i]) * i, wire).data for i in range(5)]
    path = tmp_path / "cap.bin"
    assert write_capture(path, frames) == 5
    assert list(read_capture(path)) == frames
    assert list(read_frames(path)) == frames


def test_truncated_capture(tmp_path):
    path = tmp_path / "cap.bin"
    path.write_bytes((100).to_bytes(4, "little") + b"\x00" * 10)
    with pytest.raises(MalformedFrameError):
        list(read_capture(path))


def test_hex_csv_round_trip(tmp_path, wire):
    frames = [build_frame(PacketMeta(PacketKind.AUDIO, i), b"\x7f" * 800, wire).data for i in range(3)]
    path = tmp_path / "cap.csv"
    assert write_hex_csv(path, frames) == 3
    assert read_hex_csv(path) == frames
    assert list(read_frames(path)) == frames


def test_hex_csv_export_with_several_columns(tmp_path, wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 1), b"\x01\x02", wire).data
    path = tmp_path / "export.csv"
    spaced = ":".join(f"{b:02x}" for b in frame)
    path.write_text(f"No.,Time,Data\n1,0.0001,{spaced}\n", encoding="utf-8")
    assert read_hex_csv(path) == [frame]


def test_hex_csv_rejects_bad_hex(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("frame\nzz\n", encoding="utf-8")
    with pytest.raises(MalformedFrameError):
        read_hex_csv(path)


def test_hex_csv_without_header_keeps_every_frame(tmp_path, wire):
    frames = [build_frame(PacketMeta(PacketKind.AUDIO, i), bytes([i]) * 40, wire).data for i in range(3)]
    path = tmp_path / "plain.csv"
    path.write_text("".join(f"{f.hex()}\n" for f in frames), encoding="utf-8")
    assert read_hex_csv(path) == frames


def test_hex_csv_single_line_file(tmp_path, wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 7), b"\x00\x10\x20", wire).data
    path = tmp_path / "one.csv"
    path.write_text(frame.hex() + "\n", encoding="utf-8")
    assert read_hex_csv(path) == [frame]
    assert list(read_frames(path)) == [frame]


def test_hex_csv_with_header_skips_only_header(tmp_path, wire):
    frame = build_frame(PacketMeta(PacketKind.VIDEO, 7), b"\x00\x10\x20", wire).data
    path = tmp_path / "named.csv"
    path.write_text(f"frame\n{frame.hex()}\n", encoding="utf-8")
    assert read_hex_csv(path) == [frame]


def test_hex_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    assert read_hex_csv(path) == []
