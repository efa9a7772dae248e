"""
Pacotes de áudio: PCM de 8 bits sem sinal a 8 kHz, em blocos de exatamente
800 amostras (um pacote a cada 0,1 s).
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Tuple

from ..config import Config
from ..errors import MalformedFrameError
from ..packet import PacketKind, PacketMeta
from .sequence import SequenceCounter

logger = logging.getLogger(__name__)

PACKETS_PER_SECOND = Config.AUDIO_SAMPLE_RATE / Config.AUDIO_CHUNK


@dataclass(frozen=True)
class AudioPayload:
    samples: bytes
    # zeros completados no último bloco de um arquivo (não vai para o fio)
    pad_length: int = 0

    def __post_init__(self):
        if len(self.samples) != Config.AUDIO_CHUNK:
            raise MalformedFrameError(
                f"Payload de áudio com {len(self.samples)} bytes (esperado {Config.AUDIO_CHUNK})"
            )

    def to_bytes(self) -> bytes:
        return self.samples

    @classmethod
    def from_bytes(cls, data: bytes) -> "AudioPayload":
        return cls(samples=bytes(data))


class AudioPacketizer:
    """Acumula PCM e emite um pacote a cada 800 bytes; o resto fica pendente."""

    def __init__(self, counter: Optional[SequenceCounter] = None, chunk: int = Config.AUDIO_CHUNK):
        self.counter = counter or SequenceCounter()
        self.chunk = chunk
        self._pending = bytearray()

    @property
    def pending(self) -> int:
        return len(self._pending)

    def _emit(self, samples: bytes, pad_length: int = 0) -> Tuple[PacketMeta, AudioPayload]:
        meta = PacketMeta(PacketKind.AUDIO, self.counter.next())
        return meta, AudioPayload(samples=samples, pad_length=pad_length)

    def feed(self, pcm: bytes) -> List[Tuple[PacketMeta, AudioPayload]]:
        self._pending.extend(pcm)
        packets = []
        while len(self._pending) >= self.chunk:
            packets.append(self._emit(bytes(self._pending[:self.chunk])))
            del self._pending[:self.chunk]
        return packets

    def flush(self) -> Optional[Tuple[PacketMeta, AudioPayload]]:
        """Fim de arquivo: completa o bloco parcial com zeros."""
        if not self._pending:
            return None
        pad = self.chunk - len(self._pending)
        samples = bytes(self._pending) + bytes(pad)
        self._pending.clear()
        logger.debug("Último bloco de áudio completado com %d zeros", pad)
        return self._emit(samples, pad_length=pad)


def iter_audio_packets(
    chunks: Iterable[bytes], counter: Optional[SequenceCounter] = None
) -> Iterator[Tuple[PacketMeta, AudioPayload]]:
    """Versão em fluxo: consome pedaços de PCM de qualquer tamanho."""
    packetizer = AudioPacketizer(counter)
    for chunk in chunks:
        yield from packetizer.feed(chunk)
    last = packetizer.flush()
    if last is not None:
        yield last


def audio_packetize(
    pcm: bytes, counter: Optional[SequenceCounter] = None
) -> List[Tuple[PacketMeta, AudioPayload]]:
    return list(iter_audio_packets([pcm], counter))
