"""
Configurações centrais do always_comm.

Os valores padrão reproduzem a montagem da placa: vídeo 320x180, porta 5005,
tabelas JPEG de qualidade 50%. Qualquer valor pode ser sobrescrito por
variáveis de ambiente com prefixo ALWAYSCOMM_ (arquivo .env incluído),
por um arquivo JSON (--config) ou por flags da CLI.
"""

import ipaddress
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError

# Carrega variáveis de ambiente
load_dotenv()

ENV_PREFIX = "ALWAYSCOMM_"


def _env(name: str, default: str) -> str:
    return os.getenv(f"{ENV_PREFIX}{name}", default)


def _env_int(name: str, default: int) -> Union[int, str]:
    """Texto não numérico fica como está; validate() o relata."""
    raw = _env(name, str(default))
    try:
        return int(raw)
    except ValueError:
        return raw


class Config:
    # Geometria
    WIDTH = _env_int("WIDTH", 320)
    HEIGHT = _env_int("HEIGHT", 180)

    # Endereços locais predefinidos (rede ponto a ponto com dois clientes)
    SRC_MAC = _env("SRC_MAC", "02:00:00:00:00:01")
    DST_MAC = _env("DST_MAC", "02:00:00:00:00:02")
    SRC_IP = _env("SRC_IP", "192.168.1.1")
    DST_IP = _env("DST_IP", "192.168.1.2")
    SRC_PORT = _env_int("SRC_PORT", 5005)
    DST_PORT = _env_int("DST_PORT", 5005)
    TTL = _env_int("TTL", 64)

    # Tabelas alternativas (arquivos texto)
    QUANT_LUMA_PATH = os.getenv(f"{ENV_PREFIX}QUANT_LUMA")
    QUANT_CHROMA_PATH = os.getenv(f"{ENV_PREFIX}QUANT_CHROMA")
    HUFFMAN_DIR = os.getenv(f"{ENV_PREFIX}HUFFMAN_DIR")

    LOG_LEVEL = _env("LOG_LEVEL", "INFO")

    # Constantes de protocolo
    PREAMBLE = bytes([0x55] * 7 + [0xD5])
    KIND_AUDIO = 0x00
    KIND_VIDEO = 0x01
    MAX_PAYLOAD = 1470
    MIN_FRAME = 64
    MAX_FRAME = 1518
    VIDEO_REGISTER_WORDS = 300
    AUDIO_CHUNK = 800
    AUDIO_SAMPLE_RATE = 8000
    BLOCKS_PER_PACKET = 12
    REORDER_BUFFER = 128

    # Tipos de saída
    KINDS = {
        KIND_AUDIO: "audio",
        KIND_VIDEO: "video",
    }

    @classmethod
    def validate(cls):
        """Valida se as configurações essenciais são coerentes."""
        problems = []

        for name in ("WIDTH", "HEIGHT", "SRC_PORT", "DST_PORT", "TTL"):
            if not isinstance(getattr(cls, name), int):
                problems.append(f"{ENV_PREFIX}{name} não é inteiro: {getattr(cls, name)!r}")

        if not problems:
            if cls.WIDTH <= 0 or cls.HEIGHT <= 0:
                problems.append(f"geometria inválida: {cls.WIDTH}x{cls.HEIGHT}")
            for name in ("SRC_PORT", "DST_PORT"):
                if not 0 <= getattr(cls, name) <= 0xFFFF:
                    problems.append(f"{name} fora de 16 bits")
            if not 0 <= cls.TTL <= 0xFF:
                problems.append("TTL fora de 8 bits")
        for name in ("QUANT_LUMA_PATH", "QUANT_CHROMA_PATH", "HUFFMAN_DIR"):
            path = getattr(cls, name)
            if path and not Path(path).exists():
                problems.append(f"{name} não encontrado: {path}")

        if problems:
            raise ConfigError(f"Configurações inválidas: {problems}")

        return True

    @classmethod
    def geometry(cls) -> "Geometry":
        return Geometry(width=cls.WIDTH, height=cls.HEIGHT)

    @classmethod
    def wire_config(cls, **overrides: Any) -> "WireConfig":
        values = {
            "src_mac": cls.SRC_MAC,
            "dst_mac": cls.DST_MAC,
            "src_ip": cls.SRC_IP,
            "dst_ip": cls.DST_IP,
            "src_port": cls.SRC_PORT,
            "dst_port": cls.DST_PORT,
            "ttl": cls.TTL,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return WireConfig(**values)


def _mac_bytes(value: Any) -> bytes:
    if isinstance(value, (bytes, bytearray)):
        raw = bytes(value)
    else:
        parts = str(value).replace("-", ":").split(":")
        try:
            raw = bytes(int(p, 16) for p in parts)
        except ValueError as e:
            raise ValueError(f"MAC inválido: {value}") from e
    if len(raw) != 6:
        raise ValueError(f"MAC deve ter 6 bytes: {value!r}")
    return raw


def _ip_bytes(value: Any) -> bytes:
    if isinstance(value, (bytes, bytearray)):
        raw = bytes(value)
        if len(raw) != 4:
            raise ValueError(f"IPv4 deve ter 4 bytes: {value!r}")
        return raw
    return ipaddress.IPv4Address(str(value)).packed


class Geometry(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int = Field(default=320, gt=0)
    height: int = Field(default=180, gt=0)

    @property
    def padded_width(self) -> int:
        return -(-self.width // 16) * 16

    @property
    def padded_height(self) -> int:
        # Superblocos viajam em pares: com contagem ímpar, uma linha extra
        padded = -(-self.height // 16) * 16
        if (self.padded_width // 16) * (padded // 16) % 2:
            padded += 16
        return padded

    @property
    def positions(self) -> int:
        return (self.padded_width // 16) * (self.padded_height // 16) // 2

    @classmethod
    def parse(cls, text: str) -> "Geometry":
        """Aceita o formato LARGURAxALTURA (ex.: 320x180)."""
        try:
            width, height = (int(v) for v in text.lower().split("x"))
        except ValueError as e:
            raise ConfigError(f"Geometria inválida: {text!r}") from e
        return cls(width=width, height=height)


class WireConfig(BaseModel):
    """Endereços e portas usados nos cabeçalhos Ethernet/IPv4/UDP."""

    model_config = ConfigDict(frozen=True)

    src_mac: bytes = _mac_bytes("02:00:00:00:00:01")
    dst_mac: bytes = _mac_bytes("02:00:00:00:00:02")
    src_ip: bytes = _ip_bytes("192.168.1.1")
    dst_ip: bytes = _ip_bytes("192.168.1.2")
    src_port: int = Field(default=5005, ge=0, le=0xFFFF)
    dst_port: int = Field(default=5005, ge=0, le=0xFFFF)
    ttl: int = Field(default=64, ge=0, le=0xFF)
    include_preamble: bool = True

    @field_validator("src_mac", "dst_mac", mode="before")
    @classmethod
    def _parse_mac(cls, value: Any) -> bytes:
        return _mac_bytes(value)

    @field_validator("src_ip", "dst_ip", mode="before")
    @classmethod
    def _parse_ip(cls, value: Any) -> bytes:
        return _ip_bytes(value)

    def describe(self) -> Dict[str, Any]:
        return {
            "src_mac": self.src_mac.hex(":"),
            "dst_mac": self.dst_mac.hex(":"),
            "src_ip": str(ipaddress.IPv4Address(self.src_ip)),
            "dst_ip": str(ipaddress.IPv4Address(self.dst_ip)),
            "src_port": self.src_port,
            "dst_port": self.dst_port,
            "ttl": self.ttl,
            "include_preamble": self.include_preamble,
        }


class ImpairmentConfig(BaseModel):
    drop: float = Field(default=0.0, ge=0.0, le=1.0)
    reorder: int = Field(default=0, ge=0)
    seed: int = 0


class CliConfig(BaseModel):
    """Configuração completa de uma execução da CLI, validada na partida."""

    geometry: Geometry = Field(default_factory=Config.geometry)
    wire: WireConfig = Field(default_factory=Config.wire_config)
    quant_luma_path: Optional[Path] = None
    quant_chroma_path: Optional[Path] = None
    huffman_dir: Optional[Path] = None
    impairment: ImpairmentConfig = Field(default_factory=ImpairmentConfig)
    pace: bool = False
    emulate_565: bool = False

    @classmethod
    def from_sources(
        cls, config_file: Optional[str] = None, **overrides: Any
    ) -> "CliConfig":
        """
        Monta a configuração na ordem: Config (ambiente) < arquivo JSON < flags.

        Args:
            config_file: Caminho opcional de um arquivo JSON
            overrides: Valores vindos das flags (None é ignorado)

        Returns:
            CliConfig validada
        """
        data: Dict[str, Any] = {
            "quant_luma_path": Config.QUANT_LUMA_PATH,
            "quant_chroma_path": Config.QUANT_CHROMA_PATH,
            "huffman_dir": Config.HUFFMAN_DIR,
        }

        if config_file:
            try:
                with open(config_file, "r", encoding="utf-8") as f:
                    data.update(json.load(f))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"Erro ao ler configuração {config_file}: {e}")

        wire = Config.wire_config().model_dump()
        wire.update(data.pop("wire", {}) or {})
        wire.update(overrides.pop("wire", {}) or {})
        data["wire"] = wire

        data.update({k: v for k, v in overrides.items() if v is not None})

        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigError(f"Configuração inválida: {e}") from e
