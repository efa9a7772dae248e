"""Contador global de sequência (8 bits) compartilhado por áudio e vídeo."""

SEQ_MODULUS = 256
SEQ_HALF = SEQ_MODULUS // 2


class SequenceCounter:
    def __init__(self, start: int = 0):
        self.value = start % SEQ_MODULUS

    def next(self) -> int:
        value = self.value
        self.value = (value + 1) % SEQ_MODULUS
        return value


def seq_diff(a: int, b: int) -> int:
    """Distância com sinal de `a` em relação a `b`, em [-128, 127]."""
    return ((a - b + SEQ_HALF) % SEQ_MODULUS) - SEQ_HALF
