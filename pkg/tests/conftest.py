"""Fixtures compartilhadas: quadros sintéticos determinísticos e configuração."""

import numpy as np
import pytest

from src.config import CliConfig, Geometry
from src.frame_prep import RgbFrame


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def natural_image(width: int = 320, height: int = 180, seed: int = 7) -> RgbFrame:
    """
    Cena sintética com características de foto: céu em gradiente, disco de
    bordas suaves, colina ondulada com textura e um ruído leve de sensor.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    sy, sx = yy * 180.0 / height, xx * 320.0 / width

    r = 90 + 60 * sx / 320 + 10 * np.sin(sy / 17)
    g = 130 + 50 * sy / 180
    b = 210 - 70 * sy / 180

    sun = _sigmoid((30 - np.hypot(sx - 240, sy - 50)) / 2.5)
    r = r + sun * (250 - r)
    g = g + sun * (220 - g)
    b = b + sun * (120 - b)

    hill = _sigmoid((sy - (120 + 15 * np.sin(sx / 45))) / 3)
    texture = 10 * np.sin(sx / 4.7) * np.cos(sy / 6.1)
    r = r + hill * (70 + texture - r)
    g = g + hill * (140 + texture - g)
    b = b + hill * (55 + 0.5 * texture - b)

    noise = rng.normal(0.0, 1.5, size=(height, width, 1))
    pixels = np.clip(np.stack([r, g, b], axis=-1) + noise, 0, 255).round().astype(np.uint8)
    return RgbFrame.from_array(pixels)


def gradient_frame(width: int = 320, height: int = 180) -> RgbFrame:
    yy, xx = np.mgrid[0:height, 0:width]
    pixels = np.stack(
        [xx * 255 // max(width - 1, 1), yy * 255 // max(height - 1, 1), (xx + yy) % 256],
        axis=-1,
    ).astype(np.uint8)
    return RgbFrame.from_array(pixels)


def solid_frame(color=(128, 128, 128), width: int = 320, height: int = 180) -> RgbFrame:
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[...] = color
    return RgbFrame.from_array(pixels)


@pytest.fixture
def natural_frame() -> RgbFrame:
    return natural_image()


@pytest.fixture
def gray_frame() -> RgbFrame:
    return solid_frame()


@pytest.fixture
def gradient() -> RgbFrame:
    return gradient_frame()


@pytest.fixture
def geometry() -> Geometry:
    return Geometry(width=320, height=180)


@pytest.fixture
def cli_config(monkeypatch) -> CliConfig:
    for name in ("ALWAYSCOMM_QUANT_LUMA", "ALWAYSCOMM_QUANT_CHROMA", "ALWAYSCOMM_HUFFMAN_DIR"):
        monkeypatch.delenv(name, raising=False)
    return CliConfig()
