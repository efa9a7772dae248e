import json

import pytest
from pydantic import ValidationError

from src.config import CliConfig, Config, Geometry, ImpairmentConfig, WireConfig, _env_int
from src.errors import ConfigError


def test_defaults_match_board_setup():
    assert Config.validate()
    geometry = Config.geometry()
    assert (geometry.width, geometry.height) == (320, 180)
    wire = Config.wire_config()
    assert wire.dst_port == 5005
    assert wire.describe()["src_ip"] == "192.168.1.1"


def test_geometry_padding():
    geometry = Geometry()
    assert (geometry.padded_width, geometry.padded_height) == (320, 192)
    assert geometry.positions == 120
    # 3x1 superblocos: linha extra para completar os pares
    small = Geometry(width=48, height=16)
    assert small.padded_height == 32
    assert small.positions == 3


def test_geometry_parse():
    assert Geometry.parse("640X480") == Geometry(width=640, height=480)
    with pytest.raises(ConfigError):
        Geometry.parse("640")
    with pytest.raises(ValidationError):
        Geometry(width=0, height=10)


def test_wire_config_parsing():
    wire = WireConfig(src_mac="aa-bb-cc-dd-ee-ff", dst_ip="10.0.0.2")
    assert wire.src_mac == bytes.fromhex("aabbccddeeff")
    assert wire.describe()["dst_ip"] == "10.0.0.2"
    for bad in ({"src_mac": "aa:bb"}, {"dst_ip": "300.1.1.1"}, {"ttl": 256}, {"dst_port": -1}):
        with pytest.raises(ValidationError):
            WireConfig(**bad)


def test_validate_reports_problems(monkeypatch):
    monkeypatch.setattr(Config, "TTL", 300)
    monkeypatch.setattr(Config, "HUFFMAN_DIR", "/nao/existe")
    with pytest.raises(ConfigError, match="TTL"):
        Config.validate()


def test_non_numeric_environment_is_reported(monkeypatch):
    monkeypatch.setenv("ALWAYSCOMM_WIDTH", "abc")
    monkeypatch.setenv("ALWAYSCOMM_TTL", "12")
    assert _env_int("WIDTH", 320) == "abc"
    assert _env_int("TTL", 64) == 12

    monkeypatch.setattr(Config, "WIDTH", "abc")
    with pytest.raises(ConfigError, match="ALWAYSCOMM_WIDTH"):
        Config.validate()


def test_from_sources_precedence(tmp_path, cli_config):
    path = tmp_path / "conf.json"
    path.write_text(json.dumps({
        "geometry": {"width": 64, "height": 32},
        "wire": {"dst_port": 6000, "ttl": 10},
        "pace": True,
    }))
    config = CliConfig.from_sources(str(path), wire={"dst_port": 7000}, pace=None, emulate_565=True)
    assert config.geometry == Geometry(width=64, height=32)
    assert config.wire.dst_port == 7000
    assert config.wire.ttl == 10
    assert config.pace and config.emulate_565


def test_from_sources_errors(tmp_path, cli_config):
    with pytest.raises(ConfigError):
        CliConfig.from_sources(str(tmp_path / "nada.json"))
    bad = tmp_path / "ruim.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        CliConfig.from_sources(str(bad))
    with pytest.raises(ConfigError):
        CliConfig.from_sources(impairment={"drop": 2.0})


def test_impairment_bounds():
    assert ImpairmentConfig().drop == 0.0
    with pytest.raises(ValidationError):
        ImpairmentConfig(reorder=-1)
