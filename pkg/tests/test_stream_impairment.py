import pytest

from src.config import ImpairmentConfig
from src.errors import ConfigError
from src.stream import impair
from src.stream.impairment import impair_with


def test_identity_without_impairment():
    packets = list(range(50))
    assert impair(packets) == packets
    assert impair(packets, 0.0, 0, seed=9) == packets


def test_drop_everything():
    assert impair(list(range(50)), drop_probability=1.0) == []


def test_deterministic_for_seed():
    packets = [bytes([i]) * 3 for i in range(200)]
    first = impair(packets, 0.1, 8, seed=42)
    assert first == impair(packets, 0.1, 8, seed=42)
    assert first != impair(packets, 0.1, 8, seed=43)


def test_drop_rate_is_close_to_probability():
    kept = impair(list(range(20000)), drop_probability=0.1, seed=1)
    assert 0.085 < 1 - len(kept) / 20000 < 0.115
    assert kept == sorted(kept)


@pytest.mark.parametrize("window", [1, 2, 8, 32])
def test_reorder_displacement_is_bounded(window):
    packets = list(range(500))
    shuffled = impair(packets, reorder_window=window, seed=window)
    assert sorted(shuffled) == packets
    assert all(abs(index - item) < window for index, item in enumerate(shuffled))
    if window > 1:
        assert shuffled != packets


def test_invalid_parameters():
    with pytest.raises(ConfigError):
        impair([1], drop_probability=1.5)
    with pytest.raises(ConfigError):
        impair([1], reorder_window=-1)


def test_impair_with_config():
    packets = list(range(100))
    config = ImpairmentConfig(drop=0.2, reorder=4, seed=5)
    assert impair_with(packets, config) == impair(packets, 0.2, 4, 5)
    assert impair_with(packets) == packets
