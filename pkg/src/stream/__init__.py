"""Orquestração: codificação em pacotes, remontagem, simulação de rede e modelo de ciclos."""

from .audio import AudioPacketizer, AudioPayload, audio_packetize, iter_audio_packets
from .cycles import CycleModel, ThroughputEstimate, estimate_throughput
from .impairment import impair
from .reassembly import Reassembler, ReassemblyResult, StreamStats, reassemble
from .sequence import SequenceCounter, seq_diff
from .video import (
    EncodedFrame,
    FrameAssembly,
    FrameReport,
    VideoDecoder,
    VideoEncoder,
    VideoPayload,
    decode_packet,
    encode_frame,
    psnr,
)

__all__ = [
    "AudioPacketizer",
    "AudioPayload",
    "CycleModel",
    "EncodedFrame",
    "FrameAssembly",
    "FrameReport",
    "Reassembler",
    "ReassemblyResult",
    "SequenceCounter",
    "StreamStats",
    "ThroughputEstimate",
    "VideoDecoder",
    "VideoEncoder",
    "VideoPayload",
    "audio_packetize",
    "decode_packet",
    "encode_frame",
    "estimate_throughput",
    "impair",
    "iter_audio_packets",
    "psnr",
    "reassemble",
    "seq_diff",
]
