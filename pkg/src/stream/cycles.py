"""
Modelo de ciclos do hardware: custo por pacote (pipeline do codec +
cabeçalho + dados) e taxa de quadros resultante a 100 MHz.
"""

from typing import NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import Config
from ..packet import wire_seconds


class CycleModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    dct_cycles: int = 150
    quant_zigzag_cycles: int = 70
    rle_cycles: Tuple[int, int] = (20, 30)
    blocks_per_packet: int = Field(default=Config.BLOCKS_PER_PACKET, gt=0)
    per_block_cycles: int = Field(default=240, gt=0)
    header_cycles: int = Field(default=384, ge=0)
    cycles_per_data_byte: int = Field(default=8, ge=0)
    clock_hz: int = Field(default=100_000_000, gt=0)
    packets_per_frame: int = Field(default=120, gt=0)

    @model_validator(mode="after")
    def _check_rle(self) -> "CycleModel":
        low, high = self.rle_cycles
        if not 0 <= low <= high:
            raise ValueError(f"Faixa de ciclos do RLE inválida: {self.rle_cycles}")
        return self

    @property
    def pipeline_cycles(self) -> Tuple[int, int]:
        """Soma DCT + quantização + RLE por bloco (mínimo, máximo)."""
        base = self.dct_cycles + self.quant_zigzag_cycles
        return base + self.rle_cycles[0], base + self.rle_cycles[1]


class ThroughputEstimate(NamedTuple):
    cycles_per_packet: int
    fps: float

    @property
    def meets_goal(self) -> bool:
        return self.fps >= 30.0


def estimate_throughput(model: CycleModel, mean_payload_bytes: float) -> ThroughputEstimate:
    """
    Ciclos por pacote e quadros por segundo.

    Args:
        model: Constantes do hardware
        mean_payload_bytes: Tamanho médio dos dados de vídeo por pacote

    Returns:
        ThroughputEstimate (135 bytes -> 4344 ciclos, ~192 FPS)
    """
    if mean_payload_bytes <= 0:
        raise ValueError("Tamanho médio de payload deve ser positivo")
    cycles = (
        model.blocks_per_packet * model.per_block_cycles
        + model.header_cycles
        + round(mean_payload_bytes * model.cycles_per_data_byte)
    )
    return ThroughputEstimate(cycles, model.clock_hz / (cycles * model.packets_per_frame))


def wire_fps(mean_payload_bytes: float, packets_per_frame: int = 120) -> float:
    """Limite imposto só pelo fio (100 Mbit/s, com preâmbulo e IFG)."""
    return 1.0 / (wire_seconds(round(mean_payload_bytes)) * packets_per_frame)
