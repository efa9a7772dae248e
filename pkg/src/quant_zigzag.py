"""
Quantização por multiplicação com recíprocos em ponto fixo (tabelas JPEG
de qualidade 50%), leitura em zigue-zague e as inversas para decodificação.
"""

import json
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .frame_prep import Channel

RECIP_FRAC_BITS = 21
QUANT_MIN = -1024
QUANT_MAX = 1023
# As tabelas AC padrão só representam categorias até 10
AC_MIN = -1023

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class ChannelClass(str, Enum):
    LUMINANCE = "luminance"
    CHROMINANCE = "chrominance"

    @classmethod
    def of(cls, channel: Channel) -> "ChannelClass":
        return cls.LUMINANCE if channel.is_luma else cls.CHROMINANCE


def _zigzag_order() -> np.ndarray:
    order = []
    for s in range(15):
        cells = [(r, s - r) for r in range(8) if 0 <= s - r < 8]
        # diagonais pares sobem (linha decrescente), ímpares descem
        if s % 2 == 0:
            cells.reverse()
        order.extend(r * 8 + c for r, c in cells)
    return np.array(order, dtype=np.intp)


ZIGZAG = _zigzag_order()
ZIGZAG.setflags(write=False)
INVERSE_ZIGZAG = np.argsort(ZIGZAG)
INVERSE_ZIGZAG.setflags(write=False)


@dataclass(frozen=True)
class QuantTable:
    divisors: np.ndarray  # 64 inteiros em ordem raster
    reciprocals: np.ndarray
    channel_class: ChannelClass
    recip_frac_bits: int = RECIP_FRAC_BITS

    @classmethod
    def from_divisors(
        cls, divisors: Sequence[int], channel_class: ChannelClass
    ) -> "QuantTable":
        values = np.asarray(divisors, dtype=np.int64).reshape(-1)
        if values.size != 64:
            raise ConfigError(f"Tabela de quantização com {values.size} valores (esperado 64)")
        if values.min() < 1 or values.max() > 255:
            raise ConfigError("Divisores devem estar em [1, 255]")
        # recíproco arredondado para cima: exato para |2v| + q < 2^21 / q
        reciprocals = -(-(1 << RECIP_FRAC_BITS) // values)
        values.setflags(write=False)
        reciprocals.setflags(write=False)
        return cls(divisors=values, reciprocals=reciprocals, channel_class=channel_class)


@lru_cache(maxsize=1)
def _default_divisors():
    with open(os.path.join(DATA_DIR, "jpeg_tables.json"), "r", encoding="utf-8") as f:
        return json.load(f)["quant"]


def default_table(channel_class: ChannelClass) -> QuantTable:
    return QuantTable.from_divisors(_default_divisors()[channel_class.value], channel_class)


def load_quant_table(path: str, channel_class: ChannelClass) -> QuantTable:
    """
    Lê uma tabela alternativa: 64 inteiros em ordem raster, separados por
    espaço ou vírgula; linhas iniciadas por # são comentários.
    """
    values = []
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.split("#", 1)[0].replace(",", " ")
                values.extend(int(tok) for tok in line.split())
    except (OSError, ValueError) as e:
        raise ConfigError(f"Erro ao ler tabela de quantização {path}: {e}")
    return QuantTable.from_divisors(values, channel_class)


def _as_flat(values: np.ndarray) -> np.ndarray:
    shape = values.shape
    return values.reshape(shape[:-2] + (64,)) if shape[-2:] == (8, 8) else values


def _quantize(values: np.ndarray, divisors: np.ndarray, reciprocals: np.ndarray) -> np.ndarray:
    magnitude = ((2 * np.abs(values) + divisors) * reciprocals) >> (RECIP_FRAC_BITS + 1)
    out = np.sign(values) * magnitude
    out[..., 0] = np.clip(out[..., 0], QUANT_MIN, QUANT_MAX)
    out[..., 1:] = np.clip(out[..., 1:], AC_MIN, QUANT_MAX)
    return out.astype(np.int32)


def quantize(coeffs: np.ndarray, table: QuantTable) -> np.ndarray:
    """
    round-half-away-from-zero(coef / divisor) via recíprocos.

    Args:
        coeffs: (..., 8, 8) ou (..., 64) em ordem raster
        table: Tabela do canal

    Returns:
        Inteiros em ordem raster, mesmo formato da entrada; DC em
        [-1024, 1023] e AC em [-1023, 1023]
    """
    values = np.asarray(coeffs, dtype=np.int64)
    out = _quantize(_as_flat(values), table.divisors, table.reciprocals)
    return out.reshape(values.shape)


def dequantize(quantized: np.ndarray, table: QuantTable) -> np.ndarray:
    values = np.asarray(quantized, dtype=np.int64)
    return (_as_flat(values) * table.divisors).reshape(values.shape).astype(np.int32)


def zigzag_scan(raster: np.ndarray) -> np.ndarray:
    """(..., 64) ou (..., 8, 8) em raster -> (..., 64) em zigue-zague."""
    return _as_flat(np.asarray(raster))[..., ZIGZAG]


def inverse_zigzag(zigzag: np.ndarray) -> np.ndarray:
    """(..., 64) em zigue-zague -> (..., 64) em raster."""
    return np.asarray(zigzag)[..., INVERSE_ZIGZAG]


@dataclass(frozen=True)
class QuantizedBlock:
    coeffs: np.ndarray  # 64 inteiros em zigue-zague
    channel: Channel = Channel.Y


class Quantizer:
    """Par de tabelas luminância/crominância, com sobrescrita opcional por arquivo."""

    def __init__(
        self,
        luma: Optional[QuantTable] = None,
        chroma: Optional[QuantTable] = None,
    ):
        self.luma = luma or default_table(ChannelClass.LUMINANCE)
        self.chroma = chroma or default_table(ChannelClass.CHROMINANCE)

    @classmethod
    def from_paths(cls, luma_path=None, chroma_path=None) -> "Quantizer":
        return cls(
            luma=load_quant_table(str(luma_path), ChannelClass.LUMINANCE) if luma_path else None,
            chroma=load_quant_table(str(chroma_path), ChannelClass.CHROMINANCE) if chroma_path else None,
        )

    def table_for(self, channel: Channel) -> QuantTable:
        return self.luma if ChannelClass.of(channel) is ChannelClass.LUMINANCE else self.chroma

    def quantize_blocks(self, coeffs: np.ndarray, channels: Sequence[Channel]) -> np.ndarray:
        """
        Quantiza uma pilha (..., len(channels), 8, 8) com a tabela de cada canal.

        Returns:
            (..., len(channels), 64) em ordem raster
        """
        divisors = np.stack([self.table_for(c).divisors for c in channels])
        reciprocals = np.stack([self.table_for(c).reciprocals for c in channels])
        return _quantize(_as_flat(np.asarray(coeffs, dtype=np.int64)), divisors, reciprocals)

    def dequantize_blocks(self, quantized: np.ndarray, channels: Sequence[Channel]) -> np.ndarray:
        divisors = np.stack([self.table_for(c).divisors for c in channels])
        return (np.asarray(quantized, dtype=np.int64) * divisors).astype(np.int32)
