"""
Preparação de quadros: RGB -> YCbCr 4:2:0 deslocado para [-128, 127],
com preenchimento até múltiplos de 16 e iteração por pares de superblocos
na ordem de pacotes consumida pelo codificador.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .config import Geometry
from .errors import InvalidGeometryError

# Pixel RGB (0, 0, 0) convertido para YCbCr: valores usados no preenchimento
PAD_LUMA = 0
PAD_CHROMA = 128

BLOCKS_PER_SUPERBLOCK = 6
BLOCKS_PER_PAIR = 2 * BLOCKS_PER_SUPERBLOCK


class Channel(str, Enum):
    Y = "Y"
    CB = "Cb"
    CR = "Cr"

    @property
    def is_luma(self) -> bool:
        return self is Channel.Y


# Ordem canônica de um par: superbloco A, depois B; em cada um Y0..Y3, Cb, Cr
PAIR_CHANNELS: Tuple[Channel, ...] = (
    Channel.Y, Channel.Y, Channel.Y, Channel.Y, Channel.CB, Channel.CR
) * 2


@dataclass(frozen=True)
class RgbFrame:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidGeometryError(
                f"Dimensões inválidas: {self.width}x{self.height}"
            )
        if self.pixels.shape != (self.height, self.width, 3):
            raise InvalidGeometryError(
                f"Pixels com formato {self.pixels.shape}, "
                f"esperado {(self.height, self.width, 3)}"
            )

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "RgbFrame":
        pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise InvalidGeometryError(f"Esperado array HxWx3, recebido {pixels.shape}")
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int) -> "RgbFrame":
        """Lê um quadro RGB24 cru (row-major)."""
        if len(data) != width * height * 3:
            raise InvalidGeometryError(
                f"RGB24 com {len(data)} bytes, esperado {width * height * 3}"
            )
        pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3)
        return cls(width=width, height=height, pixels=pixels.copy())

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()

    @property
    def geometry(self) -> Geometry:
        return Geometry(width=self.width, height=self.height)


@dataclass(frozen=True)
class YcbcrPlanes:
    """Planos deslocados para [-128, 127] com dimensões preenchidas."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    orig_width: int
    orig_height: int

    @property
    def padded_width(self) -> int:
        return self.y.shape[1]

    @property
    def padded_height(self) -> int:
        return self.y.shape[0]

    @property
    def superblock_cols(self) -> int:
        return self.padded_width // 16

    @property
    def total_positions(self) -> int:
        return (self.padded_width // 16) * (self.padded_height // 16) // 2


@dataclass(frozen=True)
class PixelBlock:
    samples: np.ndarray  # (8, 8) int16 em [-128, 127]
    channel: Channel


@dataclass(frozen=True)
class SuperblockPair:
    position: int
    blocks: Tuple[PixelBlock, ...]

    def as_array(self) -> np.ndarray:
        return np.stack([b.samples for b in self.blocks])


def rgb565_emulate(frame: RgbFrame) -> RgbFrame:
    """
    Reproduz a quantização RGB565 da câmera: R/B com 5 bits, G com 6,
    reexpandidos para 8 bits por replicação dos bits altos.
    """
    px = frame.pixels
    r5 = px[..., 0] >> 3
    g6 = px[..., 1] >> 2
    b5 = px[..., 2] >> 3
    out = np.stack(
        [(r5 << 3) | (r5 >> 2), (g6 << 2) | (g6 >> 4), (b5 << 3) | (b5 >> 2)],
        axis=-1,
    ).astype(np.uint8)
    return RgbFrame(width=frame.width, height=frame.height, pixels=out)


def _round_clamp(values: np.ndarray) -> np.ndarray:
    # arredondamento half-up
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(frame: RgbFrame) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conversão BT.601 full-range, por pixel, em planos de resolução cheia."""
    px = frame.pixels.astype(np.float64)
    r, g, b = px[..., 0], px[..., 1], px[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return _round_clamp(y), _round_clamp(cb), _round_clamp(cr)


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    """Inversa BT.601 full-range; retorna array (..., 3) uint8."""
    y = y.astype(np.float64)
    cb = cb.astype(np.float64) - 128.0
    cr = cr.astype(np.float64) - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return _round_clamp(np.stack([r, g, b], axis=-1))


def pad_planes(
    y: np.ndarray, cb: np.ndarray, cr: np.ndarray, geometry: Geometry
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Estende os planos (domínio [0, 255]) à direita e embaixo até a geometria
    preenchida, com pixels pretos (Y=0, Cb=Cr=128).
    """
    pad = (
        (0, geometry.padded_height - y.shape[0]),
        (0, geometry.padded_width - y.shape[1]),
    )
    return (
        np.pad(y, pad, constant_values=PAD_LUMA),
        np.pad(cb, pad, constant_values=PAD_CHROMA),
        np.pad(cr, pad, constant_values=PAD_CHROMA),
    )


def subsample_420(
    y: np.ndarray, cb: np.ndarray, cr: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Média arredondada (half-up) de cada grade 2x2 de crominância."""
    height, width = cb.shape
    if height % 2 or width % 2 or cr.shape != cb.shape:
        raise InvalidGeometryError(
            f"Subamostragem exige dimensões pares, recebido {width}x{height}"
        )

    def _mean(plane: np.ndarray) -> np.ndarray:
        grid = plane.astype(np.int32).reshape(height // 2, 2, width // 2, 2)
        return ((grid.sum(axis=(1, 3)) + 2) >> 2).astype(np.uint8)

    return y, _mean(cb), _mean(cr)


def upsample_420(plane: np.ndarray) -> np.ndarray:
    """Replicação 2x2 (vizinho mais próximo)."""
    return plane.repeat(2, axis=0).repeat(2, axis=1)


def level_shift(plane: np.ndarray) -> np.ndarray:
    return plane.astype(np.int16) - 128


def level_unshift(plane: np.ndarray) -> np.ndarray:
    return np.clip(plane.astype(np.int16) + 128, 0, 255).astype(np.uint8)


def prepare_frame(frame: RgbFrame, emulate_565: bool = False) -> YcbcrPlanes:
    """Pipeline completo: (565) -> YCbCr -> padding -> 4:2:0 -> deslocamento."""
    if emulate_565:
        frame = rgb565_emulate(frame)

    y, cb, cr = rgb_to_ycbcr(frame)
    y, cb, cr = pad_planes(y, cb, cr, frame.geometry)
    y, cb, cr = subsample_420(y, cb, cr)

    return YcbcrPlanes(
        y=level_shift(y),
        cb=level_shift(cb),
        cr=level_shift(cr),
        orig_width=frame.width,
        orig_height=frame.height,
    )


def superblock_origin(planes_or_geometry, index: int) -> Tuple[int, int]:
    """(linha, coluna) em pixels de luminância do superbloco `index`."""
    if isinstance(planes_or_geometry, Geometry):
        cols = planes_or_geometry.padded_width // 16
    else:
        cols = planes_or_geometry.superblock_cols
    return (index // cols) * 16, (index % cols) * 16


def _superblock_blocks(planes: YcbcrPlanes, index: int):
    row, col = superblock_origin(planes, index)
    for dr, dc in ((0, 0), (0, 8), (8, 0), (8, 8)):
        yield PixelBlock(planes.y[row + dr:row + dr + 8, col + dc:col + dc + 8], Channel.Y)
    crow, ccol = row // 2, col // 2
    yield PixelBlock(planes.cb[crow:crow + 8, ccol:ccol + 8], Channel.CB)
    yield PixelBlock(planes.cr[crow:crow + 8, ccol:ccol + 8], Channel.CR)


def extract_superblock_pair(planes: YcbcrPlanes, position: int) -> SuperblockPair:
    if not 0 <= position < planes.total_positions:
        raise InvalidGeometryError(
            f"Posição {position} fora de [0, {planes.total_positions})"
        )
    blocks = tuple(_superblock_blocks(planes, 2 * position)) + tuple(
        _superblock_blocks(planes, 2 * position + 1)
    )
    return SuperblockPair(position=position, blocks=blocks)


def frame_blocks(planes: YcbcrPlanes) -> np.ndarray:
    """
    Todos os blocos do quadro de uma vez, em ordem canônica.

    Returns:
        Array (posições, 12, 8, 8) int16; equivale a empilhar
        extract_superblock_pair para cada posição.
    """
    rows, cols = planes.padded_height // 16, planes.padded_width // 16
    count = rows * cols

    y = planes.y.reshape(rows, 2, 8, cols, 2, 8)
    y = y.transpose(0, 3, 1, 4, 2, 5).reshape(count, 4, 8, 8)

    def _chroma(plane: np.ndarray) -> np.ndarray:
        c = plane.reshape(rows, 8, cols, 8).transpose(0, 2, 1, 3)
        return c.reshape(count, 1, 8, 8)

    blocks = np.concatenate([y, _chroma(planes.cb), _chroma(planes.cr)], axis=1)
    return blocks.reshape(count // 2, BLOCKS_PER_PAIR, 8, 8)
