"""
Simulador de rede determinístico: perda independente por pacote e
reordenação limitada a uma janela, a partir de uma semente fixa.
"""

import logging
from typing import List, Optional, Sequence, TypeVar

import numpy as np

from ..config import ImpairmentConfig
from ..errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def impair(
    packets: Sequence[T],
    drop_probability: float = 0.0,
    reorder_window: int = 0,
    seed: int = 0,
) -> List[T]:
    """
    Aplica perda e reordenação.

    Args:
        packets: Pacotes em ordem de envio (qualquer tipo)
        drop_probability: Probabilidade de perda de cada pacote, em [0, 1]
        reorder_window: Deslocamento máximo de um pacote sobrevivente
        seed: Semente do gerador

    Returns:
        Nova lista; mesma entrada e semente produzem a mesma saída
    """
    if not 0.0 <= drop_probability <= 1.0:
        raise ConfigError(f"Probabilidade de perda fora de [0, 1]: {drop_probability}")
    if reorder_window < 0:
        raise ConfigError(f"Janela de reordenação negativa: {reorder_window}")

    rng = np.random.default_rng(seed)
    items = list(packets)

    if drop_probability > 0 and items:
        keep = rng.random(len(items)) >= drop_probability
        items = [p for p, k in zip(items, keep) if k]

    if reorder_window > 0 and items:
        # cada pacote recebe uma chave i + U[0, janela); ordenar as chaves
        # desloca qualquer pacote em menos de `janela` posições
        keys = np.arange(len(items)) + rng.random(len(items)) * reorder_window
        items = [items[i] for i in np.argsort(keys, kind="stable")]

    logger.debug(
        "Impairment: %d -> %d pacotes (perda=%.3f, janela=%d, semente=%d)",
        len(packets), len(items), drop_probability, reorder_window, seed,
    )
    return items


def impair_with(packets: Sequence[T], config: Optional[ImpairmentConfig] = None) -> List[T]:
    config = config or ImpairmentConfig()
    return impair(packets, config.drop, config.reorder, config.seed)
