"""
Quadro de fio byte a byte: preâmbulo, cabeçalhos Ethernet/IPv4/UDP,
metadados (tipo + sequência), dados e FCS CRC-32 (IEEE 802.3).

Inclui a E/S de capturas (binário com prefixo de tamanho e CSV hexadecimal)
e a dissecação campo a campo usada pelo analisador.
"""

import ipaddress
import logging
import struct
import zlib
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from .config import Config, WireConfig
from .errors import (
    ChecksumError,
    MalformedFrameError,
    NotOursError,
    PayloadTooLargeError,
)

logger = logging.getLogger(__name__)

# Tamanhos das seções do quadro
PREAMBLE_LEN = 8
ETH_HDR_LEN = 14
IP4_HDR_LEN = 20
UDP_HDR_LEN = 8
META_LEN = 2
FCS_LEN = 4
HEADERS_LEN = ETH_HDR_LEN + IP4_HDR_LEN + UDP_HDR_LEN

ETHERTYPE_IPV4 = 0x0800
IPPROTO_UDP = 17
IP4_FLAG_DF = 0x4000

# Temporização do PHY: 2 bits por ciclo a 50 MHz
WIRE_CLOCK_HZ = 50_000_000
WIRE_CYCLES_PER_BYTE = 4
IFG_CYCLES = 48

# (seção, bytes, ciclos) como documentado para o hardware. O IPv4 aparece
# com 40 ciclos, embora 20 bytes a 4 ciclos/byte deem 80.
SECTION_TABLE: Tuple[Tuple[str, int, int], ...] = (
    ("preamble", PREAMBLE_LEN, 32),
    ("ethernet", ETH_HDR_LEN, 56),
    ("ipv4", IP4_HDR_LEN, 40),
    ("udp", UDP_HDR_LEN, 32),
    ("kind", 1, 4),
    ("seq", 1, 4),
    ("data", Config.MAX_PAYLOAD, 5880),
    ("fcs", FCS_LEN, 16),
    ("ifg", 0, IFG_CYCLES),
)

_IP4_FMT = struct.Struct("!BBHHHBBH4s4s")
_UDP_FMT = struct.Struct("!HHHH")
_ETH_FMT = struct.Struct("!6s6sH")


# CRC-32


CRC32_POLY = 0xEDB88320  # polinômio refletido


def _make_crc32_table() -> Tuple[int, ...]:
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = (crc >> 1) ^ CRC32_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return tuple(table)


CRC32_TABLE = _make_crc32_table()


@dataclass(frozen=True)
class Crc32State:
    state: int = 0xFFFFFFFF
    table: Sequence[int] = field(default=CRC32_TABLE, repr=False)


def crc32_init() -> Crc32State:
    return Crc32State()


def crc32_update(state: Crc32State, byte: int) -> Crc32State:
    """Uma consulta à tabela por byte."""
    s = state.state
    return Crc32State((s >> 8) ^ state.table[(s ^ byte) & 0xFF], state.table)


def crc32_update_bytes(state: Crc32State, data: bytes) -> Crc32State:
    """Atualização em bloco (zlib opera sobre o valor já complementado)."""
    value = zlib.crc32(data, state.state ^ 0xFFFFFFFF) ^ 0xFFFFFFFF
    return Crc32State(value, state.table)


def crc32_value(state: Crc32State) -> int:
    return state.state ^ 0xFFFFFFFF


def crc32_final(state: Crc32State) -> bytes:
    """FCS na ordem de transmissão: byte menos significativo primeiro."""
    return crc32_value(state).to_bytes(4, "little")


def crc32(data: bytes) -> int:
    return crc32_value(crc32_update_bytes(crc32_init(), data))


def ipv4_checksum(header: bytes) -> int:
    """Complemento da soma em complemento de um das palavras de 16 bits."""
    if len(header) % 2:
        raise MalformedFrameError("Cabeçalho IPv4 com tamanho ímpar")
    total = sum(struct.unpack(f"!{len(header) // 2}H", header))
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


# Quadro


class PacketKind(IntEnum):
    AUDIO = Config.KIND_AUDIO
    VIDEO = Config.KIND_VIDEO


@dataclass(frozen=True)
class PacketMeta:
    kind: PacketKind
    seq: int

    def __post_init__(self):
        if not 0 <= self.seq <= 0xFF:
            raise ValueError(f"Sequência {self.seq} fora de 8 bits")


@dataclass(frozen=True)
class WireFrame:
    data: bytes
    has_preamble: bool = False

    @property
    def ethernet(self) -> bytes:
        """Quadro sem preâmbulo (cabeçalhos até o FCS)."""
        return self.data[PREAMBLE_LEN:] if self.has_preamble else self.data

    def __len__(self) -> int:
        return len(self.data)

    def __bytes__(self) -> bytes:
        return self.data


def _ip_header(cfg: WireConfig, total_length: int) -> bytes:
    header = _IP4_FMT.pack(
        0x45, 0, total_length, 0, IP4_FLAG_DF, cfg.ttl, IPPROTO_UDP, 0,
        cfg.src_ip, cfg.dst_ip,
    )
    checksum = ipv4_checksum(header)
    return header[:10] + checksum.to_bytes(2, "big") + header[12:]


def build_frame(
    meta: PacketMeta, payload: bytes, cfg: Optional[WireConfig] = None
) -> WireFrame:
    """
    Serializa um pacote completo.

    Args:
        meta: Tipo e número de sequência
        payload: Dados (até 1470 bytes)
        cfg: Endereços/portas; padrão vindo de Config

    Returns:
        WireFrame com preâmbulo opcional, padding mínimo de 64 bytes e FCS
    """
    cfg = cfg or Config.wire_config()
    if len(payload) > Config.MAX_PAYLOAD:
        raise PayloadTooLargeError(
            f"Payload de {len(payload)} bytes excede {Config.MAX_PAYLOAD}"
        )

    udp_length = UDP_HDR_LEN + META_LEN + len(payload)
    body = b"".join((
        _ETH_FMT.pack(cfg.dst_mac, cfg.src_mac, ETHERTYPE_IPV4),
        _ip_header(cfg, IP4_HDR_LEN + udp_length),
        _UDP_FMT.pack(cfg.src_port, cfg.dst_port, udp_length, 0),
        bytes((int(meta.kind), meta.seq)),
        payload,
    ))
    short = Config.MIN_FRAME - FCS_LEN - len(body)
    if short > 0:
        body += bytes(short)

    fcs = crc32(body).to_bytes(4, "little")
    prefix = Config.PREAMBLE if cfg.include_preamble else b""
    return WireFrame(data=prefix + body + fcs, has_preamble=cfg.include_preamble)


def strip_preamble(data: bytes) -> Tuple[bytes, bool]:
    if data[:PREAMBLE_LEN] == Config.PREAMBLE:
        return data[PREAMBLE_LEN:], True
    return data, False


def _parse_meta(kind: int, seq: int) -> PacketMeta:
    try:
        return PacketMeta(PacketKind(kind), seq)
    except ValueError:
        raise MalformedFrameError(f"Tipo de pacote desconhecido: {kind:#04x}")


def parse_frame(data: bytes, cfg: Optional[WireConfig] = None) -> Tuple[PacketMeta, bytes]:
    """
    Valida e extrai (meta, payload) de um quadro, com ou sem preâmbulo.

    Raises:
        ChecksumError: FCS ou checksum IPv4 inválidos
        NotOursError: EtherType, protocolo ou porta de destino diferentes
        MalformedFrameError: quadro truncado ou comprimentos incoerentes
    """
    cfg = cfg or Config.wire_config()
    frame, _ = strip_preamble(bytes(data))

    if len(frame) < Config.MIN_FRAME:
        raise MalformedFrameError(f"Quadro com {len(frame)} bytes (mínimo {Config.MIN_FRAME})")
    if len(frame) > Config.MAX_FRAME:
        raise MalformedFrameError(f"Quadro com {len(frame)} bytes (máximo {Config.MAX_FRAME})")

    body, fcs = frame[:-FCS_LEN], frame[-FCS_LEN:]
    if crc32(body) != int.from_bytes(fcs, "little"):
        raise ChecksumError("FCS inválido")

    _, _, ethertype = _ETH_FMT.unpack_from(body, 0)
    if ethertype != ETHERTYPE_IPV4:
        raise NotOursError(f"EtherType {ethertype:#06x}")

    version_ihl = body[ETH_HDR_LEN]
    if version_ihl >> 4 != 4:
        raise NotOursError(f"IP versão {version_ihl >> 4}")
    ihl = (version_ihl & 0x0F) * 4
    if ihl < IP4_HDR_LEN or ETH_HDR_LEN + ihl + UDP_HDR_LEN > len(body):
        raise MalformedFrameError(f"IHL inválido: {ihl}")

    ip_header = body[ETH_HDR_LEN:ETH_HDR_LEN + ihl]
    if ipv4_checksum(ip_header) != 0:
        raise ChecksumError("Checksum IPv4 inválido")
    fields = _IP4_FMT.unpack_from(ip_header)
    total_length, protocol = fields[2], fields[6]
    if protocol != IPPROTO_UDP:
        raise NotOursError(f"Protocolo IP {protocol}")

    udp_start = ETH_HDR_LEN + ihl
    _, dst_port, udp_length, _ = _UDP_FMT.unpack_from(body, udp_start)
    if dst_port != cfg.dst_port:
        raise NotOursError(f"Porta de destino {dst_port}")
    if udp_length != total_length - ihl:
        raise MalformedFrameError(
            f"Comprimentos incoerentes: IPv4 {total_length}, UDP {udp_length}"
        )
    if udp_length < UDP_HDR_LEN + META_LEN or udp_start + udp_length > len(body):
        raise MalformedFrameError(f"Comprimento UDP inválido: {udp_length}")

    data_start = udp_start + UDP_HDR_LEN
    meta = _parse_meta(body[data_start], body[data_start + 1])
    return meta, body[data_start + META_LEN:udp_start + udp_length]


def build_datagram(meta: PacketMeta, payload: bytes) -> bytes:
    """Payload UDP para o modo socket (do byte de tipo em diante)."""
    if len(payload) > Config.MAX_PAYLOAD:
        raise PayloadTooLargeError(
            f"Payload de {len(payload)} bytes excede {Config.MAX_PAYLOAD}"
        )
    return bytes((int(meta.kind), meta.seq)) + payload


def parse_datagram(datagram: bytes) -> Tuple[PacketMeta, bytes]:
    if len(datagram) < META_LEN:
        raise MalformedFrameError(f"Datagrama com {len(datagram)} bytes")
    if len(datagram) > META_LEN + Config.MAX_PAYLOAD:
        raise MalformedFrameError(f"Datagrama com {len(datagram)} bytes")
    return _parse_meta(datagram[0], datagram[1]), bytes(datagram[META_LEN:])


def wire_cycles(payload_len: int, include_preamble: bool = True) -> int:
    """Ciclos de 50 MHz para transmitir um quadro, incluindo o IFG."""
    frame_len = max(HEADERS_LEN + META_LEN + payload_len, Config.MIN_FRAME - FCS_LEN) + FCS_LEN
    if include_preamble:
        frame_len += PREAMBLE_LEN
    return frame_len * WIRE_CYCLES_PER_BYTE + IFG_CYCLES


def wire_seconds(payload_len: int, include_preamble: bool = True) -> float:
    return wire_cycles(payload_len, include_preamble) / WIRE_CLOCK_HZ


# Dissecação


@dataclass
class FrameDissection:
    length: int
    has_preamble: bool = False
    dst_mac: Optional[str] = None
    src_mac: Optional[str] = None
    ethertype: Optional[int] = None
    ip_version: Optional[int] = None
    ip_total_length: Optional[int] = None
    ttl: Optional[int] = None
    protocol: Optional[int] = None
    src_ip: Optional[str] = None
    dst_ip: Optional[str] = None
    ip_checksum_ok: Optional[bool] = None
    src_port: Optional[int] = None
    dst_port: Optional[int] = None
    udp_length: Optional[int] = None
    fcs_ok: Optional[bool] = None
    kind: Optional[str] = None
    seq: Optional[int] = None
    payload_len: Optional[int] = None
    position: Optional[int] = None
    error: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["valid"] = self.valid
        return data


def dissect_frame(data: bytes, cfg: Optional[WireConfig] = None) -> FrameDissection:
    """
    Lê todos os campos que existirem, sem levantar exceções; a validade
    final vem de parse_frame, para que o analisador concorde com o receptor.
    """
    frame, has_preamble = strip_preamble(bytes(data))
    info = FrameDissection(length=len(frame), has_preamble=has_preamble)

    if len(frame) >= FCS_LEN:
        info.fcs_ok = crc32(frame[:-FCS_LEN]) == int.from_bytes(frame[-FCS_LEN:], "little")
    if len(frame) >= ETH_HDR_LEN:
        dst, src, info.ethertype = _ETH_FMT.unpack_from(frame, 0)
        info.dst_mac, info.src_mac = dst.hex(":"), src.hex(":")
    if len(frame) >= ETH_HDR_LEN + IP4_HDR_LEN:
        fields = _IP4_FMT.unpack_from(frame, ETH_HDR_LEN)
        info.ip_version = fields[0] >> 4
        info.ip_total_length, info.ttl, info.protocol = fields[2], fields[5], fields[6]
        info.src_ip = str(ipaddress.IPv4Address(fields[8]))
        info.dst_ip = str(ipaddress.IPv4Address(fields[9]))
        info.ip_checksum_ok = ipv4_checksum(frame[ETH_HDR_LEN:ETH_HDR_LEN + IP4_HDR_LEN]) == 0
    if len(frame) >= HEADERS_LEN:
        info.src_port, info.dst_port, info.udp_length, _ = _UDP_FMT.unpack_from(
            frame, ETH_HDR_LEN + IP4_HDR_LEN
        )

    try:
        meta, payload = parse_frame(frame, cfg)
    except (ChecksumError, NotOursError, MalformedFrameError) as e:
        info.error = f"{type(e).__name__}: {e}"
        return info

    info.kind = Config.KINDS[int(meta.kind)]
    info.seq = meta.seq
    info.payload_len = len(payload)
    if meta.kind is PacketKind.VIDEO and payload:
        info.position = payload[0]
    return info


# Capturas


def write_capture(path, frames: Iterable[bytes]) -> int:
    """Grava quadros com prefixo de 4 bytes (little-endian) de tamanho."""
    count = 0
    with open(path, "wb") as f:
        for frame in frames:
            data = bytes(frame)
            f.write(len(data).to_bytes(4, "little"))
            f.write(data)
            count += 1
    return count


def read_capture(path) -> Iterator[bytes]:
    with open(path, "rb") as f:
        while True:
            prefix = f.read(4)
            if not prefix:
                return
            if len(prefix) < 4:
                raise MalformedFrameError(f"{path}: prefixo de tamanho truncado")
            size = int.from_bytes(prefix, "little")
            data = f.read(size)
            if len(data) < size:
                raise MalformedFrameError(f"{path}: quadro truncado ({len(data)}/{size})")
            yield data


_HEX_COLUMNS = ("frame", "data", "hex", "raw", "payload")


def write_hex_csv(path, frames: Iterable[bytes]) -> int:
    df = pd.DataFrame({"frame": [bytes(f).hex() for f in frames]})
    df.to_csv(path, index=False)
    return len(df)


def _strip_separators(text: str) -> str:
    return "".join(ch for ch in text if ch not in ": \t")


def _is_hex(text: str) -> bool:
    try:
        bytes.fromhex(_strip_separators(text))
    except ValueError:
        return False
    return True


def read_hex_csv(path) -> List[bytes]:
    """
    Lê um quadro por linha em hexadecimal. Aceita arquivo de uma coluna, com
    ou sem cabeçalho, ou exportação com várias colunas (usa
    frame/data/hex/raw/payload, ou a primeira).
    """
    try:
        df = pd.read_csv(path, header=None, dtype=str, keep_default_na=False).fillna("")
    except pd.errors.EmptyDataError:
        return []
    if df.empty:
        return []

    # a primeira linha só é cabeçalho se nomear a coluna ou não for hexadecimal
    first = [str(cell).lower().strip() for cell in df.iloc[0]]
    named = [first.index(name) for name in _HEX_COLUMNS if name in first]
    column = named[0] if named else 0
    start = 1 if named or not _is_hex(df.iloc[0, column]) else 0

    frames = []
    for row in range(start, len(df)):
        try:
            frames.append(bytes.fromhex(_strip_separators(df.iloc[row, column])))
        except ValueError as e:
            raise MalformedFrameError(f"{path}:{row + 1}: hexadecimal inválido ({e})")
    return frames


def read_frames(path) -> Iterator[bytes]:
    """Escolhe o leitor pela extensão (.csv -> hexadecimal)."""
    if Path(path).suffix.lower() == ".csv":
        yield from read_hex_csv(path)
    else:
        yield from read_capture(path)
