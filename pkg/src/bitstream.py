"""
Serialização em palavras de 32 bits (MSB primeiro) e leitura bit a bit.

Padding final sempre com zeros; não há byte-stuffing (o fluxo vive dentro
de payloads UDP, não de um arquivo JFIF).
"""

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

from .entropy import CodedUnit
from .errors import InvariantViolation, MalformedStreamError, StreamExhaustedError

ALIGNED_BITS = 27
WORD_BITS = 32
WORD_MASK = (1 << WORD_BITS) - 1


class AlignedValue(NamedTuple):
    bits: int  # conteúdo alinhado à esquerda em 27 bits
    len: int

    @property
    def payload(self) -> int:
        return self.bits >> (ALIGNED_BITS - self.len)


def align(unit: CodedUnit) -> AlignedValue:
    length = unit.codeword_len + unit.value_len
    if length > ALIGNED_BITS:
        raise InvariantViolation(f"Unidade com {length} bits não cabe em {ALIGNED_BITS}")
    payload = (unit.codeword << unit.value_len) | unit.value_bits
    return AlignedValue(payload << (ALIGNED_BITS - length), length)


class BitAccumulator:
    """Buffer que emite uma palavra sempre que acumula 32 bits ou mais."""

    def __init__(self):
        self.buffer = 0
        self.count = 0

    def append(self, value: AlignedValue) -> Optional[int]:
        self.buffer = (self.buffer << value.len) | value.payload
        self.count += value.len
        if self.count < WORD_BITS:
            return None
        # entrada máxima de 27 bits: no máximo uma palavra por append
        self.count -= WORD_BITS
        word = self.buffer >> self.count
        self.buffer &= (1 << self.count) - 1
        return word

    def flush(self) -> Optional[int]:
        if not self.count:
            return None
        word = (self.buffer << (WORD_BITS - self.count)) & WORD_MASK
        self.buffer = 0
        self.count = 0
        return word


@dataclass(frozen=True)
class WordStream:
    words: Sequence[int]
    total_bits: int

    def __post_init__(self):
        if self.total_bits > WORD_BITS * len(self.words):
            raise InvariantViolation(
                f"{self.total_bits} bits não cabem em {len(self.words)} palavras"
            )

    def __len__(self) -> int:
        return len(self.words)

    def to_bytes(self) -> bytes:
        """Palavras em big-endian, concatenadas."""
        return b"".join(w.to_bytes(4, "big") for w in self.words)

    @classmethod
    def from_bytes(cls, data: bytes) -> "WordStream":
        if len(data) % 4:
            raise MalformedStreamError(f"Fluxo com {len(data)} bytes não é múltiplo de 4")
        words = [int.from_bytes(data[i:i + 4], "big") for i in range(0, len(data), 4)]
        return cls(words=words, total_bits=WORD_BITS * len(words))


class BitWriter:
    """
    Acumula bits em um inteiro único e produz o WordStream no final.

    Equivalente a alinhar cada unidade e passá-la por um BitAccumulator,
    com flush ao final.
    """

    def __init__(self):
        self._value = 0
        self.total_bits = 0

    def write(self, bits: int, length: int) -> None:
        self._value = (self._value << length) | bits
        self.total_bits += length

    def write_unit(self, unit: CodedUnit) -> None:
        self.write((unit.codeword << unit.value_len) | unit.value_bits,
                   unit.codeword_len + unit.value_len)

    def write_units(self, units: Iterable[CodedUnit]) -> None:
        for unit in units:
            self.write_unit(unit)

    def to_bytes(self) -> bytes:
        n_words = -(-self.total_bits // WORD_BITS)
        pad = n_words * WORD_BITS - self.total_bits
        return (self._value << pad).to_bytes(4 * n_words, "big")

    def to_word_stream(self) -> WordStream:
        data = self.to_bytes()
        words = [int.from_bytes(data[i:i + 4], "big") for i in range(0, len(data), 4)]
        return WordStream(words=words, total_bits=self.total_bits)


class BitReader:
    """Leitura MSB-first; peek completa com zeros além do fim."""

    def __init__(self, source: Union[WordStream, bytes, bytearray]):
        if isinstance(source, WordStream):
            data = source.to_bytes()
            self.total_bits = source.total_bits
        else:
            data = bytes(source)
            self.total_bits = 8 * len(data)
        self._size = 8 * len(data)
        self._value = int.from_bytes(data, "big")
        self.position = 0

    @property
    def remaining(self) -> int:
        return self.total_bits - self.position

    def peek(self, k: int) -> int:
        end = self.position + k
        if end <= self._size:
            return (self._value >> (self._size - end)) & ((1 << k) - 1)
        available = self._size - self.position
        head = self._value & ((1 << available) - 1) if available > 0 else 0
        return head << (k - max(available, 0))

    def read(self, k: int) -> int:
        if k == 0:
            return 0
        if k > self.remaining:
            raise StreamExhaustedError(
                f"Leitura de {k} bits com apenas {self.remaining} restantes"
            )
        value = self.peek(k)
        self.position += k
        return value

    def skip(self, k: int) -> None:
        if k > self.remaining:
            raise StreamExhaustedError(f"Avanço de {k} bits além do fim")
        self.position += k

    def padding_is_zero(self) -> bool:
        """Verifica se os bits do cursor até o fim do buffer são zeros."""
        rest = self._size - self.position
        return rest <= 0 or not (self._value & ((1 << rest) - 1))


def pack_units(units: Iterable[CodedUnit]) -> WordStream:
    """Caminho de referência: align -> BitAccumulator -> flush."""
    acc = BitAccumulator()
    words: List[int] = []
    total = 0
    for unit in units:
        value = align(unit)
        total += value.len
        word = acc.append(value)
        if word is not None:
            words.append(word)
    last = acc.flush()
    if last is not None:
        words.append(last)
    return WordStream(words=words, total_bits=total)
