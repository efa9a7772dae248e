"""
Remontagem no receptor: ordenação canônica pelo número de sequência,
roteamento por tipo, quadros de vídeo por posição e áudio concatenado.

Os pacotes passam por um buffer de reordenação limitado (heap) e saem em
ordem de sequência; a fronteira entre quadros é detectada nessa ordem,
quando a posição não cresce em relação ao pacote de vídeo anterior.
"""

import heapq
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

from ..config import Config, Geometry, WireConfig
from ..errors import CodecError, MalformedFrameError
from ..packet import PacketKind, PacketMeta
from ..router import PacketRouter
from .audio import AudioPayload
from .sequence import SEQ_MODULUS, seq_diff
from .video import RAW_PACKET_BYTES, FrameAssembly, VideoDecoder, VideoPayload, decode_packet

logger = logging.getLogger(__name__)

Payload = Union[bytes, VideoPayload, AudioPayload]


@dataclass
class StreamStats:
    packets_seen: int = 0
    video_packets: int = 0
    audio_packets: int = 0
    lost: int = 0
    out_of_order: int = 0
    duplicates: int = 0
    late: int = 0
    rejected: int = 0
    decode_errors: int = 0
    frames: int = 0
    dropped_positions: int = 0
    video_payload_bytes: int = 0
    audio_bytes: int = 0

    @property
    def mean_video_payload(self) -> float:
        return self.video_payload_bytes / self.video_packets if self.video_packets else 0.0

    @property
    def compression_ratio(self) -> float:
        mean = self.mean_video_payload
        return RAW_PACKET_BYTES / mean if mean else 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["mean_video_payload"] = self.mean_video_payload
        data["compression_ratio"] = self.compression_ratio
        return data


@dataclass
class ReassemblyResult:
    frames: List[FrameAssembly]
    audio: bytes
    stats: StreamStats

    @property
    def completeness(self) -> float:
        if not self.frames:
            return 0.0
        return sum(f.completeness for f in self.frames) / len(self.frames)


def payload_bytes(payload: Payload) -> bytes:
    if isinstance(payload, (VideoPayload, AudioPayload)):
        return payload.to_bytes()
    return bytes(payload)


class Reassembler:
    """Remontagem incremental; `finish()` esvazia o buffer e fecha o último quadro."""

    def __init__(
        self,
        geometry: Optional[Geometry] = None,
        decoder: Optional[VideoDecoder] = None,
        reorder_buffer: int = Config.REORDER_BUFFER,
        router: Optional[PacketRouter] = None,
        audio_sink: Optional[Callable[[bytes], None]] = None,
        frame_sink: Optional[Callable[[FrameAssembly], None]] = None,
        decode_video: bool = True,
    ):
        if not 0 < reorder_buffer <= SEQ_MODULUS // 2:
            raise ValueError(f"Buffer de reordenação deve estar em [1, {SEQ_MODULUS // 2}]")
        self.geometry = geometry or Config.geometry()
        self.decoder = decoder or VideoDecoder()
        self.reorder_buffer = reorder_buffer
        self.router = router or PacketRouter()
        self.decode_video = decode_video
        self.stats = StreamStats()

        self.frames: List[FrameAssembly] = []
        self._audio = bytearray()
        self._audio_sink = audio_sink or self._audio.extend
        self._frame_sink = frame_sink or self.frames.append

        self._heap: List[Tuple[int, int, PacketMeta, bytes]] = []
        self._arrivals = 0
        self._highest: Optional[int] = None
        self._next: Optional[int] = None
        self._seen = set()
        self._assembly: Optional[FrameAssembly] = None
        self._last_position = -1

    # Chegada

    def _unwrap(self, seq: int) -> int:
        if self._highest is None:
            return seq
        return self._highest + seq_diff(seq, self._highest % SEQ_MODULUS)

    def push(self, meta: PacketMeta, payload: Payload) -> None:
        self.stats.packets_seen += 1
        absolute = self._unwrap(meta.seq)

        if absolute in self._seen:
            self.stats.duplicates += 1
            return
        self._seen.add(absolute)

        if self._highest is None or absolute > self._highest:
            self._highest = absolute
        elif absolute < self._highest:
            self.stats.out_of_order += 1

        self._arrivals += 1
        heapq.heappush(self._heap, (absolute, self._arrivals, meta, payload_bytes(payload)))
        while len(self._heap) > self.reorder_buffer:
            self._release()

        if len(self._seen) > 4 * self.reorder_buffer and self._next is not None:
            floor = self._next - self.reorder_buffer
            self._seen = {s for s in self._seen if s >= floor}

    def push_raw(self, data: bytes) -> None:
        """Quadro de fio (ou datagrama, conforme o roteador)."""
        route = self.router.route(data)
        if not route["success"]:
            self.stats.packets_seen += 1
            self.stats.rejected += 1
            return
        self.push(route["meta"], route["payload"])

    def feed(self, items: Iterable[Union[bytes, Tuple[PacketMeta, Payload]]]) -> "Reassembler":
        for item in items:
            if isinstance(item, (bytes, bytearray, memoryview)):
                self.push_raw(bytes(item))
            else:
                self.push(*item)
        return self

    # Entrega em ordem de sequência

    def _release(self) -> None:
        absolute, _, meta, payload = heapq.heappop(self._heap)
        if self._next is not None:
            if absolute < self._next:
                self.stats.late += 1
                self.stats.lost -= 1
                logger.debug("Pacote %d chegou depois de ser dado como perdido", absolute)
                return
            if absolute > self._next:
                self.stats.lost += absolute - self._next
                logger.debug("Lacuna de sequência: %d pacote(s) antes de %d", absolute - self._next, absolute)
        self._next = absolute + 1
        self._deliver(meta, payload)

    def _deliver(self, meta: PacketMeta, payload: bytes) -> None:
        if meta.kind is PacketKind.AUDIO:
            try:
                AudioPayload.from_bytes(payload)
            except MalformedFrameError as e:
                self.stats.rejected += 1
                logger.warning("Áudio descartado: %s", e)
                return
            self.stats.audio_packets += 1
            self.stats.audio_bytes += len(payload)
            self._audio_sink(payload)
            return

        self.stats.video_packets += 1
        self.stats.video_payload_bytes += len(payload)
        try:
            video = VideoPayload.from_bytes(payload)
        except CodecError as e:
            self.stats.decode_errors += 1
            logger.warning("Vídeo descartado: %s", e)
            return
        if video.position >= self.geometry.positions:
            self.stats.decode_errors += 1
            logger.warning("Posição %d fora do quadro", video.position)
            return

        if self._assembly is not None and video.position <= self._last_position:
            self._close_frame()
        if self._assembly is None:
            self._assembly = FrameAssembly(self.geometry)
        self._last_position = video.position
        if self.decode_video:
            decode_packet(video, self._assembly, self.decoder)
        else:
            self._assembly.received[video.position] = ()

    def _close_frame(self) -> None:
        assembly = self._assembly
        self._assembly = None
        self._last_position = -1
        self.stats.frames += 1
        self.stats.dropped_positions += len(assembly.missing_positions)
        self.stats.decode_errors += assembly.errors
        self._frame_sink(assembly)

    def finish(self) -> ReassemblyResult:
        while self._heap:
            self._release()
        if self._assembly is not None:
            self._close_frame()
        return ReassemblyResult(frames=self.frames, audio=bytes(self._audio), stats=self.stats)


def reassemble(
    packets: Iterable[Union[bytes, Tuple[PacketMeta, Payload]]],
    geometry: Optional[Geometry] = None,
    wire: Optional[WireConfig] = None,
    **kwargs: Any,
) -> ReassemblyResult:
    """
    Remonta quadros e áudio de uma sequência de pacotes.

    Args:
        packets: Quadros de fio ou pares (meta, payload), em ordem de chegada
        geometry: Geometria do vídeo (padrão: Config)
        wire: Configuração usada para validar quadros de fio

    Returns:
        ReassemblyResult com quadros, áudio e estatísticas
    """
    router = kwargs.pop("router", None) or PacketRouter(wire)
    return Reassembler(geometry=geometry, router=router, **kwargs).feed(packets).finish()
