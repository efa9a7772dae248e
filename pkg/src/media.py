"""
Leitura e escrita de quadros: PNG/PPM (e qualquer formato do Pillow)
e fluxos RGB24 crus.
"""

import logging
from pathlib import Path
from typing import Iterable, Iterator, List, Optional

import numpy as np
from PIL import Image

from .config import Geometry
from .errors import ConfigError, InvalidGeometryError
from .frame_prep import RgbFrame

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".ppm", ".pnm", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff"}
RAW_SUFFIXES = {".rgb", ".raw", ".rgb24"}


def load_image(path) -> RgbFrame:
    try:
        with Image.open(path) as img:
            return RgbFrame.from_array(np.asarray(img.convert("RGB")))
    except OSError as e:
        raise ConfigError(f"Erro ao ler imagem {path}: {e}")


def save_image(frame: RgbFrame, path) -> Path:
    """Formato pela extensão (.png, .ppm, ...)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(frame.pixels).save(path)
    return path


def read_raw_frames(path, geometry: Geometry) -> Iterator[RgbFrame]:
    frame_size = geometry.width * geometry.height * 3
    with open(path, "rb") as f:
        while True:
            data = f.read(frame_size)
            if not data:
                return
            if len(data) < frame_size:
                raise InvalidGeometryError(
                    f"{path}: quadro final com {len(data)} de {frame_size} bytes"
                )
            yield RgbFrame.from_bytes(data, geometry.width, geometry.height)


def write_raw_frames(frames: Iterable[RgbFrame], path) -> int:
    count = 0
    with open(path, "wb") as f:
        for frame in frames:
            f.write(frame.to_bytes())
            count += 1
    return count


def iter_frames(source, geometry: Optional[Geometry] = None) -> Iterator[RgbFrame]:
    """
    Quadros de um arquivo de imagem, de um diretório (ordem alfabética)
    ou de um fluxo RGB24 cru (exige geometria).
    """
    source = Path(source)
    if not source.exists():
        raise ConfigError(f"Entrada não encontrada: {source}")

    if source.is_dir():
        files = sorted(p for p in source.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if not files:
            raise ConfigError(f"Nenhuma imagem em {source}")
        for path in files:
            yield load_image(path)
    elif source.suffix.lower() in RAW_SUFFIXES:
        if geometry is None:
            raise ConfigError("Entrada RGB24 crua exige --geometry")
        yield from read_raw_frames(source, geometry)
    else:
        yield load_image(source)


def write_frames(frames: Iterable[RgbFrame], output, fmt: str = "png") -> List[Path]:
    """
    Grava quadros em `output`: um diretório com quadro_0000.<fmt>, ou um
    único arquivo RGB24 quando fmt == "raw".
    """
    output = Path(output)
    if fmt == "raw":
        output.parent.mkdir(parents=True, exist_ok=True)
        write_raw_frames(frames, output)
        return [output]

    output.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, frame in enumerate(frames):
        paths.append(save_image(frame, output / f"quadro_{index:04d}.{fmt}"))
    logger.debug("%d quadros gravados em %s", len(paths), output)
    return paths
