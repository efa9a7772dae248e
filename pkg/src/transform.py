"""
DCT direta em ponto fixo pelo algoritmo butterfly (separação par/ímpar)
e IDCT em precisão dupla para o decodificador.

Fluxo de ponto fixo: entrada Q0 -> linhas Q5 -> colunas Q10 -> inteiro.
Normalização JPEG: o DC de um bloco constante v vale 8v.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .frame_prep import Channel, PixelBlock

CONST_FRAC_BITS = 15
PASS_FRAC_BITS = 5


def _fixed(value: float) -> int:
    return int(round(value * (1 << CONST_FRAC_BITS)))


@dataclass(frozen=True)
class ButterflyConstants:
    """Constantes cos(kπ/16) em ponto fixo, já com o fator 1/2 ortonormal."""

    const_frac_bits: int = CONST_FRAC_BITS
    # k -> round(2^15 * cos(kπ/16) / 2); k = 4 carrega o 1/(2√2) do termo DC
    cos: Dict[int, int] = field(
        default_factory=lambda: {
            k: _fixed(math.cos(k * math.pi / 16) / 2) for k in range(1, 8)
        }
    )


BUTTERFLY = ButterflyConstants()


@dataclass(frozen=True)
class DctVector:
    values: np.ndarray
    frac_bits: int
    saturated: bool = False


@dataclass(frozen=True)
class DctCoeffBlock:
    coeffs: np.ndarray  # (8, 8) raster, inteiros
    channel: Channel = Channel.Y
    saturated: bool = False


def _round_shift(values: np.ndarray, shift: int) -> np.ndarray:
    """Deslocamento à direita com arredondamento half-away-from-zero."""
    half = 1 << (shift - 1)
    return np.sign(values) * ((np.abs(values) + half) >> shift)


def _saturate(values: np.ndarray, bits: int) -> Tuple[np.ndarray, np.ndarray]:
    low, high = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    clipped = np.clip(values, low, high)
    return clipped, clipped != values


def _butterfly(x: np.ndarray) -> np.ndarray:
    """DCT-II de 8 pontos sobre o último eixo; resultado com +15 bits fracionários."""
    c = BUTTERFLY.cos
    x0, x1, x2, x3, x4, x5, x6, x7 = (x[..., i] for i in range(8))

    # Estágio 1: simétrico / antissimétrico
    s0, s1, s2, s3 = x0 + x7, x1 + x6, x2 + x5, x3 + x4
    d0, d1, d2, d3 = x0 - x7, x1 - x6, x2 - x5, x3 - x4

    # Estágio 2: parte par
    e0, e1 = s0 + s3, s1 + s2
    e2, e3 = s0 - s3, s1 - s2

    out = (
        c[4] * (e0 + e1),
        c[1] * d0 + c[3] * d1 + c[5] * d2 + c[7] * d3,
        c[2] * e2 + c[6] * e3,
        c[3] * d0 - c[7] * d1 - c[1] * d2 - c[5] * d3,
        c[4] * (e0 - e1),
        c[5] * d0 - c[1] * d1 + c[7] * d2 + c[3] * d3,
        c[6] * e2 - c[2] * e3,
        c[7] * d0 - c[5] * d1 + c[3] * d2 - c[1] * d3,
    )
    return np.stack(out, axis=-1)


def _pass(values: np.ndarray, frac_bits: int) -> Tuple[np.ndarray, np.ndarray]:
    raw = _butterfly(values.astype(np.int64))
    out = _round_shift(raw, CONST_FRAC_BITS - PASS_FRAC_BITS)
    return _saturate(out, 9 + frac_bits + PASS_FRAC_BITS + 3)


def dct_1d(samples, frac_bits: int = 0) -> DctVector:
    """
    DCT 1D de 8 amostras em ponto fixo.

    Args:
        samples: 8 valores (ou array (..., 8)) com `frac_bits` bits fracionários
        frac_bits: 0 ou 5

    Returns:
        DctVector com frac_bits + 5 bits fracionários
    """
    values = np.asarray(samples, dtype=np.int64)
    out, clipped = _pass(values, frac_bits)
    return DctVector(
        values=out,
        frac_bits=frac_bits + PASS_FRAC_BITS,
        saturated=bool(clipped.any()),
    )


def dct_2d_fixed(samples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    DCT 2D em Q10 para um bloco (8, 8) ou pilha (..., 8, 8).

    Returns:
        (coeficientes Q10, máscara de saturação por bloco)
    """
    samples = np.asarray(samples, dtype=np.int64)
    rows, sat_rows = _pass(samples, 0)
    cols, sat_cols = _pass(rows.swapaxes(-1, -2), PASS_FRAC_BITS)
    saturated = sat_rows.any(axis=(-1, -2)) | sat_cols.any(axis=(-1, -2))
    return cols.swapaxes(-1, -2), saturated


def dct_2d_blocks(samples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Versão vetorizada de dct_2d: (..., 8, 8) -> (coeficientes int32, saturação)."""
    q10, saturated = dct_2d_fixed(samples)
    coeffs, clipped = _saturate(_round_shift(q10, 2 * PASS_FRAC_BITS), 12)
    saturated = saturated | clipped.any(axis=(-1, -2))
    return coeffs.astype(np.int32), saturated


def dct_2d(block: Union[PixelBlock, np.ndarray], channel: Optional[Channel] = None) -> DctCoeffBlock:
    if isinstance(block, PixelBlock):
        samples, channel = block.samples, block.channel
    else:
        samples = block
    coeffs, saturated = dct_2d_blocks(np.asarray(samples).reshape(8, 8))
    return DctCoeffBlock(
        coeffs=coeffs,
        channel=channel or Channel.Y,
        saturated=bool(saturated),
    )


@lru_cache(maxsize=1)
def dct_matrix() -> np.ndarray:
    """Base ortonormal 8x8 da DCT-II em precisão dupla."""
    k = np.arange(8).reshape(8, 1)
    n = np.arange(8).reshape(1, 8)
    basis = np.cos((2 * n + 1) * k * np.pi / 16) / 2
    basis[0, :] /= math.sqrt(2)
    basis.setflags(write=False)
    return basis


def idct_2d_blocks(coeffs: np.ndarray) -> np.ndarray:
    """IDCT 2D em precisão dupla para (..., 8, 8); arredonda e limita a [-128, 127]."""
    m = dct_matrix()
    samples = m.T @ np.asarray(coeffs, dtype=np.float64) @ m
    return np.clip(np.floor(samples + 0.5), -128, 127).astype(np.int16)


def idct_2d(coeffs: Union[DctCoeffBlock, np.ndarray]) -> PixelBlock:
    if isinstance(coeffs, DctCoeffBlock):
        values, channel = coeffs.coeffs, coeffs.channel
    else:
        values, channel = coeffs, Channel.Y
    samples = idct_2d_blocks(np.asarray(values).reshape(8, 8))
    return PixelBlock(samples=samples, channel=channel)
