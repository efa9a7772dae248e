"""
Pacotes de vídeo: cada pacote carrega a posição de um par de superblocos
e os 12 blocos codificados em palavras de 32 bits, decodificável sozinho.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..bitstream import BitReader, BitWriter, WordStream
from ..config import Config, Geometry
from ..entropy import EntropyCoder
from ..errors import CodecError, InvalidGeometryError, PayloadOverflowError
from ..frame_prep import (
    BLOCKS_PER_PAIR,
    PAIR_CHANNELS,
    RgbFrame,
    frame_blocks,
    level_unshift,
    prepare_frame,
    superblock_origin,
    upsample_420,
    ycbcr_to_rgb,
)
from ..packet import PacketKind, PacketMeta
from ..quant_zigzag import Quantizer, inverse_zigzag, zigzag_scan
from ..transform import dct_2d_blocks, idct_2d_blocks
from .sequence import SequenceCounter

logger = logging.getLogger(__name__)

MID_GRAY = 128
# 12 blocos x 64 coeficientes x 11 bits
RAW_PACKET_BYTES = BLOCKS_PER_PAIR * 64 * 11 // 8
MAX_POSITIONS = 256


@dataclass(frozen=True)
class VideoPayload:
    position: int
    words: WordStream

    @property
    def size(self) -> int:
        return 1 + 4 * len(self.words)

    def to_bytes(self) -> bytes:
        return bytes((self.position,)) + self.words.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "VideoPayload":
        if not data:
            raise CodecError("Payload de vídeo vazio")
        return cls(position=data[0], words=WordStream.from_bytes(data[1:]))


@dataclass
class FrameReport:
    packets: int = 0
    payload_bytes: int = 0
    saturated_blocks: int = 0
    register_overflows: int = 0

    @property
    def mean_payload(self) -> float:
        return self.payload_bytes / self.packets if self.packets else 0.0

    @property
    def compression_ratio(self) -> float:
        return RAW_PACKET_BYTES / self.mean_payload if self.packets else 0.0

    def to_dict(self) -> Dict[str, float]:
        return {
            "packets": self.packets,
            "payload_bytes": self.payload_bytes,
            "mean_payload": self.mean_payload,
            "compression_ratio": self.compression_ratio,
            "saturated_blocks": self.saturated_blocks,
            "register_overflows": self.register_overflows,
        }


@dataclass
class EncodedFrame:
    packets: List[Tuple[PacketMeta, VideoPayload]]
    report: FrameReport

    def __iter__(self) -> Iterator[Tuple[PacketMeta, VideoPayload]]:
        return iter(self.packets)

    def __len__(self) -> int:
        return len(self.packets)


def _check_geometry(geometry: Geometry) -> None:
    if geometry.positions > MAX_POSITIONS:
        raise InvalidGeometryError(
            f"{geometry.width}x{geometry.height} exige {geometry.positions} posições "
            f"(máximo {MAX_POSITIONS} com 1 byte)"
        )


class VideoEncoder:
    """Pipeline de codificação de um quadro, vetorizado até a entropia."""

    def __init__(
        self,
        geometry: Optional[Geometry] = None,
        quantizer: Optional[Quantizer] = None,
        coder: Optional[EntropyCoder] = None,
        emulate_565: bool = False,
    ):
        self.geometry = geometry
        self.quantizer = quantizer or Quantizer()
        self.coder = coder or EntropyCoder()
        self.emulate_565 = emulate_565
        if geometry is not None:
            _check_geometry(geometry)

    def encode(self, frame: RgbFrame, counter: SequenceCounter) -> EncodedFrame:
        if self.geometry is not None and (frame.width, frame.height) != (
            self.geometry.width, self.geometry.height
        ):
            raise InvalidGeometryError(
                f"Quadro {frame.width}x{frame.height} difere da configuração "
                f"{self.geometry.width}x{self.geometry.height}"
            )
        _check_geometry(frame.geometry)

        planes = prepare_frame(frame, self.emulate_565)
        coeffs, saturated = dct_2d_blocks(frame_blocks(planes))
        zigzag = zigzag_scan(self.quantizer.quantize_blocks(coeffs, PAIR_CHANNELS))

        report = FrameReport(saturated_blocks=int(saturated.sum()))
        packets = []
        for position in range(zigzag.shape[0]):
            writer = BitWriter()
            for b, channel in enumerate(PAIR_CHANNELS):
                writer.write(*self.coder.pack_block(zigzag[position, b], channel))
            payload = VideoPayload(position=position, words=writer.to_word_stream())

            if payload.size > Config.MAX_PAYLOAD:
                raise PayloadOverflowError(
                    f"Posição {position}: {payload.size} bytes excede {Config.MAX_PAYLOAD}"
                )
            if len(payload.words) > Config.VIDEO_REGISTER_WORDS:
                report.register_overflows += 1
                logger.warning(
                    "Posição %d usa %d palavras (registrador de %d)",
                    position, len(payload.words), Config.VIDEO_REGISTER_WORDS,
                )

            report.packets += 1
            report.payload_bytes += payload.size
            packets.append((PacketMeta(PacketKind.VIDEO, counter.next()), payload))

        if report.saturated_blocks:
            logger.debug("%d blocos saturados na DCT", report.saturated_blocks)
        return EncodedFrame(packets=packets, report=report)


def encode_frame(
    frame: RgbFrame, seq_start: int = 0, encoder: Optional[VideoEncoder] = None
) -> EncodedFrame:
    """
    Codifica um quadro em um pacote por posição.

    Args:
        frame: Quadro RGB
        seq_start: Primeiro número de sequência
        encoder: Codificador configurado (padrão: tabelas JPEG 50%)

    Returns:
        EncodedFrame com os pares (meta, payload) e o relatório do quadro
    """
    return (encoder or VideoEncoder()).encode(frame, SequenceCounter(seq_start))


class VideoDecoder:
    def __init__(
        self,
        quantizer: Optional[Quantizer] = None,
        coder: Optional[EntropyCoder] = None,
    ):
        self.quantizer = quantizer or Quantizer()
        self.coder = coder or EntropyCoder()

    def decode_coefficients(self, payload: VideoPayload) -> np.ndarray:
        """(12, 64) coeficientes quantizados em zigue-zague; ignora o padding final."""
        reader = BitReader(payload.words)
        out = np.empty((BLOCKS_PER_PAIR, 64), dtype=np.int32)
        for b, channel in enumerate(PAIR_CHANNELS):
            out[b] = self.coder.decode_block(reader, channel).coeffs
        if not reader.padding_is_zero():
            logger.debug("Posição %d: bits após o último bloco não são zero", payload.position)
        return out

    def decode_tiles(self, payload: VideoPayload) -> Tuple[np.ndarray, np.ndarray]:
        """Os dois superblocos do pacote como RGB (16, 16, 3)."""
        raster = inverse_zigzag(self.decode_coefficients(payload))
        dequantized = self.quantizer.dequantize_blocks(raster, PAIR_CHANNELS)
        samples = idct_2d_blocks(dequantized.reshape(BLOCKS_PER_PAIR, 8, 8))
        return _superblock_rgb(samples[:6]), _superblock_rgb(samples[6:])


def _superblock_rgb(samples: np.ndarray) -> np.ndarray:
    y = np.block([[samples[0], samples[1]], [samples[2], samples[3]]])
    cb = upsample_420(samples[4])
    cr = upsample_420(samples[5])
    return ycbcr_to_rgb(level_unshift(y), level_unshift(cb), level_unshift(cr))


class FrameAssembly:
    """Quadro em reconstrução; posições ausentes ficam em cinza médio."""

    def __init__(self, geometry: Geometry):
        self.geometry = geometry
        self.pixels = np.full(
            (geometry.padded_height, geometry.padded_width, 3), MID_GRAY, dtype=np.uint8
        )
        self.received: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self.errors = 0

    @property
    def completeness(self) -> float:
        return len(self.received) / self.geometry.positions

    @property
    def missing_positions(self) -> List[int]:
        return [p for p in range(self.geometry.positions) if p not in self.received]

    def place(self, position: int, tiles: Tuple[np.ndarray, np.ndarray]) -> None:
        if not 0 <= position < self.geometry.positions:
            raise InvalidGeometryError(f"Posição {position} fora do quadro")
        # posição repetida: o último pacote vence
        self.received[position] = tiles
        for offset, tile in enumerate(tiles):
            row, col = superblock_origin(self.geometry, 2 * position + offset)
            self.pixels[row:row + 16, col:col + 16] = tile

    def superblock(self, index: int) -> np.ndarray:
        row, col = superblock_origin(self.geometry, index)
        return self.pixels[row:row + 16, col:col + 16]

    def to_frame(self) -> RgbFrame:
        """Recorta para a geometria original."""
        return RgbFrame.from_array(self.pixels[:self.geometry.height, :self.geometry.width])


def decode_packet(
    payload: VideoPayload, assembly: FrameAssembly, decoder: Optional[VideoDecoder] = None
) -> FrameAssembly:
    """
    Decodifica um pacote e escreve seus superblocos na montagem.
    Pacotes inválidos são descartados e contados em `assembly.errors`.
    """
    if not 0 <= payload.position < assembly.geometry.positions:
        assembly.errors += 1
        logger.warning("Posição %d rejeitada (quadro tem %d)", payload.position, assembly.geometry.positions)
        return assembly
    try:
        tiles = (decoder or VideoDecoder()).decode_tiles(payload)
    except CodecError as e:
        assembly.errors += 1
        logger.warning("Pacote da posição %d descartado: %s", payload.position, e)
        return assembly
    assembly.place(payload.position, tiles)
    return assembly


def psnr(reference: np.ndarray, decoded: np.ndarray) -> float:
    """PSNR em dB para imagens de 8 bits; infinito se idênticas."""
    ref = np.asarray(reference, dtype=np.float64)
    out = np.asarray(decoded, dtype=np.float64)
    if ref.shape != out.shape:
        raise InvalidGeometryError(f"Formatos diferentes: {ref.shape} e {out.shape}")
    mse = float(np.mean((ref - out) ** 2))
    if mse == 0:
        return math.inf
    return 10 * math.log10(255.0 ** 2 / mse)
