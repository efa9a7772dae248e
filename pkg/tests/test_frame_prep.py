import numpy as np
import pytest

from src.config import Geometry
from src.errors import InvalidGeometryError
from src.frame_prep import (
    PAIR_CHANNELS,
    Channel,
    RgbFrame,
    YcbcrPlanes,
    extract_superblock_pair,
    frame_blocks,
    level_shift,
    level_unshift,
    pad_planes,
    prepare_frame,
    rgb565_emulate,
    rgb_to_ycbcr,
    subsample_420,
    superblock_origin,
    upsample_420,
    ycbcr_to_rgb,
)

from .conftest import solid_frame


def _pixel(r, g, b):
    return RgbFrame.from_array(np.array([[[r, g, b]]], dtype=np.uint8))


@pytest.mark.parametrize(
    "rgb, expected",
    [
        ((0, 0, 0), (0, 128, 128)),
        ((255, 255, 255), (255, 128, 128)),
        ((128, 128, 128), (128, 128, 128)),
        ((255, 0, 0), (76, 85, 255)),
        ((0, 0, 255), (29, 255, 107)),
    ],
)
def test_rgb_to_ycbcr_bt601_full_range(rgb, expected):
    y, cb, cr = rgb_to_ycbcr(_pixel(*rgb))
    assert (int(y[0, 0]), int(cb[0, 0]), int(cr[0, 0])) == expected


def test_ycbcr_round_trip_is_close():
    rng = np.random.default_rng(1)
    frame = RgbFrame.from_array(rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8))
    back = ycbcr_to_rgb(*rgb_to_ycbcr(frame))
    assert np.abs(back.astype(int) - frame.pixels.astype(int)).max() <= 3


def test_subsample_rounds_half_up():
    y = np.zeros((2, 2), dtype=np.uint8)
    cb = np.array([[1, 2], [3, 4]], dtype=np.uint8)
    cr = np.array([[0, 0], [0, 1]], dtype=np.uint8)
    _, cb_s, cr_s = subsample_420(y, cb, cr)
    assert cb_s[0, 0] == 3  # (10 + 2) >> 2
    assert cr_s[0, 0] == 0  # (1 + 2) >> 2


def test_subsample_rejects_odd_dimensions():
    plane = np.zeros((3, 4), dtype=np.uint8)
    with pytest.raises(InvalidGeometryError):
        subsample_420(plane, plane, plane)


def test_upsample_replicates_each_sample():
    plane = np.array([[1, 2], [3, 4]])
    assert upsample_420(plane).tolist() == [
        [1, 1, 2, 2],
        [1, 1, 2, 2],
        [3, 3, 4, 4],
        [3, 3, 4, 4],
    ]


def test_level_shift_range():
    plane = np.array([0, 128, 255], dtype=np.uint8)
    shifted = level_shift(plane)
    assert shifted.tolist() == [-128, 0, 127]
    assert level_unshift(shifted).tolist() == [0, 128, 255]


def test_pad_uses_black_pixels():
    geometry = Geometry(width=8, height=8)
    ones = np.full((8, 8), 200, dtype=np.uint8)
    y, cb, cr = pad_planes(ones, ones, ones, geometry)
    assert y.shape == (geometry.padded_height, geometry.padded_width)
    assert (y[8:, :] == 0).all() and (y[:, 8:] == 0).all()
    assert (cb[8:, :] == 128).all() and (cr[:, 8:] == 128).all()


def test_prepare_frame_pads_odd_superblock_count():
    frame = solid_frame((255, 255, 255), width=16, height=16)
    planes = prepare_frame(frame)
    # um único superbloco ganha uma linha extra de preenchimento
    assert planes.y.shape == (32, 16)
    assert planes.cb.shape == (16, 8)
    assert planes.total_positions == 1
    assert (planes.y[:16] == 127).all()
    assert (planes.y[16:] == -128).all()
    assert (planes.cb[8:] == 0).all()


def test_prepare_frame_default_geometry(natural_frame):
    planes = prepare_frame(natural_frame)
    assert planes.y.shape == (192, 320)
    assert planes.cb.shape == (96, 160)
    assert planes.total_positions == 120
    assert planes.y.min() >= -128 and planes.y.max() <= 127


def test_superblock_origin_row_major(geometry):
    assert superblock_origin(geometry, 0) == (0, 0)
    assert superblock_origin(geometry, 19) == (0, 304)
    assert superblock_origin(geometry, 20) == (16, 0)
    assert superblock_origin(geometry, 239) == (176, 304)


def test_pair_channel_order():
    assert PAIR_CHANNELS == (Channel.Y,) * 4 + (Channel.CB, Channel.CR) + (Channel.Y,) * 4 + (
        Channel.CB,
        Channel.CR,
    )


def test_extract_superblock_pair_layout(gradient):
    planes = prepare_frame(gradient)
    pair = extract_superblock_pair(planes, 1)
    assert [b.channel for b in pair.blocks] == list(PAIR_CHANNELS)
    # posição 1 = superblocos 2 e 3 da primeira linha
    assert np.array_equal(pair.blocks[0].samples, planes.y[0:8, 32:40])
    assert np.array_equal(pair.blocks[3].samples, planes.y[8:16, 40:48])
    assert np.array_equal(pair.blocks[4].samples, planes.cb[0:8, 16:24])
    assert np.array_equal(pair.blocks[6].samples, planes.y[0:8, 48:56])
    assert np.array_equal(pair.blocks[11].samples, planes.cr[0:8, 24:32])


def test_extract_superblock_pair_rejects_out_of_range(gradient):
    planes = prepare_frame(gradient)
    with pytest.raises(InvalidGeometryError):
        extract_superblock_pair(planes, planes.total_positions)


def test_frame_blocks_matches_pair_extraction(gradient):
    planes = prepare_frame(gradient)
    blocks = frame_blocks(planes)
    assert blocks.shape == (120, 12, 8, 8)
    for position in (0, 1, 19, 57, 119):
        assert np.array_equal(blocks[position], extract_superblock_pair(planes, position).as_array())


def test_rgb565_emulation_extremes():
    frame = RgbFrame.from_array(np.array([[[255, 255, 255], [0, 0, 0], [8, 4, 8]]], dtype=np.uint8))
    out = rgb565_emulate(frame).pixels
    assert out[0, 0].tolist() == [255, 255, 255]
    assert out[0, 1].tolist() == [0, 0, 0]
    assert out[0, 2].tolist() == [8, 4, 8]


def test_rgb_frame_validation():
    with pytest.raises(InvalidGeometryError):
        RgbFrame.from_array(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(InvalidGeometryError):
        RgbFrame.from_bytes(b"\x00" * 10, 2, 2)
    frame = RgbFrame.from_bytes(bytes(range(12)), 2, 2)
    assert frame.to_bytes() == bytes(range(12))


def test_rgb565_emulation_replicates_high_bits():
    frame = rgb565_emulate(_pixel(0b10110111, 0b10110111, 0b10110111))
    assert frame.pixels[0, 0].tolist() == [0b10110101, 0b10110110, 0b10110101]


def test_rgb565_emulation_is_idempotent_and_monotonic():
    ramp = np.arange(256, dtype=np.uint8)
    frame = RgbFrame.from_array(np.stack([ramp, ramp, ramp], axis=-1)[None])
    once = rgb565_emulate(frame)
    assert np.array_equal(rgb565_emulate(once).pixels, once.pixels)
    assert (np.diff(once.pixels.astype(np.int16), axis=1) >= 0).all()


def test_frame_blocks_cover_every_sample_once():
    geometry = Geometry()
    h, w = geometry.padded_height, geometry.padded_width
    chroma = (h // 2) * (w // 2)
    y = np.arange(h * w, dtype=np.int64).reshape(h, w)
    cb = (h * w + np.arange(chroma, dtype=np.int64)).reshape(h // 2, w // 2)
    planes = YcbcrPlanes(
        y=y, cb=cb, cr=cb + chroma, orig_width=geometry.width, orig_height=geometry.height
    )

    blocks = frame_blocks(planes)
    assert np.array_equal(np.sort(blocks.ravel()), np.arange(h * w + 2 * chroma))
    for position in range(planes.total_positions):
        assert np.array_equal(extract_superblock_pair(planes, position).as_array(), blocks[position])
