"""
CLI do always_comm: codificação, decodificação, envio/recepção UDP,
análise de capturas, simulação de rede e modelo de ciclos.

Códigos de saída: 0 sucesso, 1 uso, 2 validação/IO, 3 protocolo.
"""

import argparse
import functools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

import pandas as pd

from .config import CliConfig, Config, Geometry, ImpairmentConfig
from .entropy import EntropyCoder, HuffmanTables
from .errors import AlwaysCommError, UsageError
from .frame_prep import RgbFrame
from .media import iter_frames, write_frames
from .packet import (
    PacketMeta,
    build_frame,
    dissect_frame,
    read_frames,
    write_capture,
    write_hex_csv,
)
from .quant_zigzag import Quantizer
from .router import PacketRouter
from .stream import (
    AudioPacketizer,
    CycleModel,
    FrameReport,
    Reassembler,
    SequenceCounter,
    VideoDecoder,
    VideoEncoder,
    estimate_throughput,
    psnr,
)
from .stream.cycles import wire_fps
from .stream.impairment import impair_with
from .stream.live import UdpReceiver, UdpSender
from .stream.video import RAW_PACKET_BYTES
from .utils import display_response, format_report, print_info, print_table, setup_logging

logger = logging.getLogger(__name__)

PAYLOAD_BINS = [0, 64, 128, 256, 512, 1024, Config.MAX_PAYLOAD + 1]


def _write_frames_file(path, frames: Iterable[bytes]) -> int:
    if Path(path).suffix.lower() == ".csv":
        return write_hex_csv(path, list(frames))
    return write_capture(path, frames)


class AlwaysCommSystem:
    def __init__(self, config: Optional[CliConfig] = None):
        self.config = config or CliConfig.from_sources()

        self.quantizer = Quantizer.from_paths(
            self.config.quant_luma_path, self.config.quant_chroma_path
        )
        tables = HuffmanTables.from_dir(self.config.huffman_dir) if self.config.huffman_dir else None
        self.coder = EntropyCoder(tables)
        self.encoder = VideoEncoder(
            self.config.geometry, self.quantizer, self.coder, self.config.emulate_565
        )
        self.decoder = VideoDecoder(self.quantizer, self.coder)

    # Codificação

    def encode_packets(
        self,
        frames: Iterable[RgbFrame],
        pcm: Optional[bytes] = None,
        reports: Optional[List[FrameReport]] = None,
        frame_count: Optional[int] = None,
    ) -> Iterator[Tuple[PacketMeta, Any]]:
        """
        Pacotes de vídeo quadro a quadro, com o áudio intercalado de forma
        proporcional; um único contador de sequência para os dois tipos.
        """
        counter = SequenceCounter()
        audio = AudioPacketizer(counter)
        pcm = pcm or b""
        chunks = [pcm[i:i + Config.AUDIO_CHUNK] for i in range(0, len(pcm), Config.AUDIO_CHUNK)]
        fed = 0

        for index, frame in enumerate(frames):
            encoded = self.encoder.encode(frame, counter)
            if reports is not None:
                reports.append(encoded.report)
            yield from encoded.packets

            if frame_count:
                target = min(len(chunks), math.ceil((index + 1) * len(chunks) / frame_count))
                while fed < target:
                    yield from audio.feed(chunks[fed])
                    fed += 1

        for chunk in chunks[fed:]:
            yield from audio.feed(chunk)
        last = audio.flush()
        if last is not None:
            logger.info("Último pacote de áudio completado com %d zeros", last[1].pad_length)
            yield last

    def encode(self, source: str, output: str, audio: Optional[str] = None) -> Dict[str, Any]:
        if not Path(source).exists():
            raise UsageError(f"Entrada não encontrada: {source}")
        frames = list(iter_frames(source, self.config.geometry))
        pcm = Path(audio).read_bytes() if audio else None

        reports: List[FrameReport] = []
        wire = self.config.wire
        packets = self.encode_packets(frames, pcm, reports, frame_count=len(frames))
        total = _write_frames_file(
            output, (build_frame(meta, payload.to_bytes(), wire).data for meta, payload in packets)
        )

        video_packets = sum(r.packets for r in reports)
        payload_bytes = sum(r.payload_bytes for r in reports)
        mean = payload_bytes / video_packets if video_packets else 0.0
        warnings = []
        overflows = sum(r.register_overflows for r in reports)
        if overflows:
            warnings.append(f"{overflows} pacote(s) acima do registrador de {Config.VIDEO_REGISTER_WORDS} palavras")

        return {
            "success": True,
            "report": {
                "frames": len(frames),
                "packets": total,
                "video_packets": video_packets,
                "audio_packets": total - video_packets,
                "mean_video_payload": mean,
                "compression_ratio": RAW_PACKET_BYTES / mean if mean else 0.0,
                "saturated_blocks": sum(r.saturated_blocks for r in reports),
                "register_overflows": overflows,
                "output": str(output),
            },
            "per_frame": [r.to_dict() for r in reports],
            "warnings": warnings,
        }

    # Decodificação

    def _reassembler(self, datagram_mode: bool = False) -> Reassembler:
        return Reassembler(
            geometry=self.config.geometry,
            decoder=self.decoder,
            router=PacketRouter(self.config.wire, datagram_mode=datagram_mode),
        )

    def _finish_decode(
        self,
        result,
        output: Optional[str],
        fmt: str,
        audio_out: Optional[str],
        reference: Optional[str],
    ) -> Dict[str, Any]:
        frames = [assembly.to_frame() for assembly in result.frames]
        if output:
            write_frames(frames, output, fmt)
        if audio_out:
            Path(audio_out).write_bytes(result.audio)

        report = dict(result.stats.to_dict())
        report["completeness"] = result.completeness
        warnings = []
        if result.frames and result.completeness < 1.0:
            warnings.append(f"Completude {result.completeness:.1%}: posições ausentes em cinza")

        if reference:
            refs = list(iter_frames(reference, self.config.geometry))
            values = [psnr(r.pixels, f.pixels) for r, f in zip(refs, frames)]
            if len(refs) != len(frames):
                warnings.append(f"{len(refs)} quadros de referência para {len(frames)} decodificados")
            if values:
                report["psnr_db"] = min(values)
                report["psnr_mean_db"] = sum(values) / len(values)

        return {"success": True, "report": report, "warnings": warnings}

    def decode(
        self,
        capture: str,
        output: Optional[str] = None,
        fmt: str = "png",
        audio_out: Optional[str] = None,
        reference: Optional[str] = None,
    ) -> Dict[str, Any]:
        if not Path(capture).exists():
            raise UsageError(f"Captura não encontrada: {capture}")
        result = self._reassembler().feed(read_frames(capture)).finish()
        return self._finish_decode(result, output, fmt, audio_out, reference)

    # Ao vivo

    def send(
        self, source: str, host: str, port: int, audio: Optional[str] = None
    ) -> Dict[str, Any]:
        if not Path(source).exists():
            raise UsageError(f"Entrada não encontrada: {source}")
        frames = list(iter_frames(source, self.config.geometry))
        pcm = Path(audio).read_bytes() if audio else None
        with UdpSender(host, port, pace=self.config.pace) as sender:
            report = sender.send(self.encode_packets(frames, pcm, frame_count=len(frames)))
        return {"success": True, "report": {"frames": len(frames), **report.to_dict()}}

    def receive(
        self,
        port: int,
        output: Optional[str] = None,
        capture: Optional[str] = None,
        max_packets: Optional[int] = None,
        timeout: float = 2.0,
        fmt: str = "png",
        audio_out: Optional[str] = None,
    ) -> Dict[str, Any]:
        reassembler = self._reassembler(datagram_mode=True)
        kept: List[bytes] = []
        with UdpReceiver(port=port, timeout=timeout) as receiver:
            for datagram in receiver.datagrams(max_packets):
                route = reassembler.router.route(datagram)
                if route["success"]:
                    kept.append(build_frame(route["meta"], route["payload"], self.config.wire).data)
                reassembler.push_raw(datagram)
        if capture:
            _write_frames_file(capture, kept)
        return self._finish_decode(reassembler.finish(), output, fmt, audio_out, None)

    # Análise

    def _dissect(self, capture: str) -> pd.DataFrame:
        if not Path(capture).exists():
            raise UsageError(f"Captura não encontrada: {capture}")
        rows = [dissect_frame(f, self.config.wire).to_dict() for f in read_frames(capture)]
        return pd.DataFrame(rows)

    def analyze(self, capture: str, limit: int = 20) -> Dict[str, Any]:
        df = self._dissect(capture)
        if df.empty:
            return {"success": True, "report": {"frames": 0}, "rows": [], "warnings": ["Captura vazia"]}

        valid = df[df["valid"]]
        video = valid[valid["kind"] == "video"]
        mean = float(video["payload_len"].mean()) if not video.empty else 0.0
        histogram = (
            pd.cut(video["payload_len"], bins=PAYLOAD_BINS, right=False)
            .value_counts(sort=False)
            .to_dict()
        )
        reasons = df.loc[~df["valid"], "error"].str.split(":").str[0].value_counts().to_dict()

        report = {
            "frames": len(df),
            "valid": len(valid),
            "invalid": len(df) - len(valid),
            "fcs_ok": int(df["fcs_ok"].fillna(False).astype(bool).sum()),
            "video_packets": len(video),
            "audio_packets": int((valid["kind"] == "audio").sum()),
            "mean_video_payload": mean,
            "compression_ratio": RAW_PACKET_BYTES / mean if mean else 0.0,
        }
        columns = ["seq", "kind", "position", "payload_len", "fcs_ok", "ip_checksum_ok", "error"]
        head = df[columns].head(limit).astype(object)
        head = head.where(head.notna(), None)
        return {
            "success": True,
            "report": report,
            "histogram": {str(k): int(v) for k, v in histogram.items()},
            "invalid_reasons": reasons,
            "rows": head.to_dict("records"),
            "warnings": [f"{report['invalid']} quadro(s) inválido(s)"] if report["invalid"] else [],
        }

    def simulate(self, capture: str, output: str) -> Dict[str, Any]:
        if not Path(capture).exists():
            raise UsageError(f"Captura não encontrada: {capture}")
        frames = list(read_frames(capture))
        imp = self.config.impairment
        kept = impair_with(frames, imp)
        _write_frames_file(output, kept)
        return {
            "success": True,
            "report": {
                "input_frames": len(frames),
                "output_frames": len(kept),
                "dropped": len(frames) - len(kept),
                "drop": imp.drop,
                "reorder": imp.reorder,
                "seed": imp.seed,
            },
        }

    def cycles(self, capture: str, model: Optional[CycleModel] = None) -> Dict[str, Any]:
        df = self._dissect(capture)
        video = df[(df["valid"]) & (df["kind"] == "video")] if not df.empty else df
        if video.empty:
            raise AlwaysCommError(f"Nenhum pacote de vídeo válido em {capture}")

        model = model or CycleModel()
        mean = float(video["payload_len"].mean())
        estimate = estimate_throughput(model, mean)
        return {
            "success": True,
            "report": {
                "video_packets": len(video),
                "mean_video_payload": mean,
                "block_pipeline_cycles": list(model.pipeline_cycles),
                "cycles_per_packet": estimate.cycles_per_packet,
                "fps": estimate.fps,
                "meets_30fps": estimate.meets_goal,
                "wire_fps": wire_fps(mean, model.packets_per_frame),
            },
        }

    def get_system_info(self) -> Dict[str, Any]:
        geometry = self.config.geometry
        return {
            "success": True,
            "report": {
                "geometry": f"{geometry.width}x{geometry.height}",
                "padded": f"{geometry.padded_width}x{geometry.padded_height}",
                "positions": geometry.positions,
                **self.config.wire.describe(),
                "quant_luma": str(self.config.quant_luma_path or "padrão JPEG 50%"),
                "quant_chroma": str(self.config.quant_chroma_path or "padrão JPEG 50%"),
                "huffman": str(self.config.huffman_dir or "padrão JPEG"),
                "log_level": Config.LOG_LEVEL,
            },
        }


# Argumentos


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: erro: {message}\n")


def _positive_fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("deve estar em [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="always_comm", description="📡 Videoconferência MJPEG sobre Ethernet/UDP")
    parser.add_argument("--config", help="Arquivo JSON de configuração")
    parser.add_argument("--geometry", help="LARGURAxALTURA (padrão 320x180)")
    parser.add_argument("--report", help="Grava o relatório (.json em JSON, outra extensão em texto)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log em nível DEBUG")

    preamble = argparse.ArgumentParser(add_help=False)
    preamble.add_argument("--preamble", dest="preamble", action="store_true", default=None)
    preamble.add_argument("--no-preamble", dest="preamble", action="store_false")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", parents=[preamble], help="Quadros -> captura")
    p.add_argument("input", help="Imagem, diretório ou arquivo RGB24")
    p.add_argument("output", help="Captura (.bin ou .csv)")
    p.add_argument("--audio", help="PCM 8 bits sem sinal, 8 kHz")
    p.add_argument("--emulate-565", action="store_true", default=None)
    p.add_argument("--port", type=int)

    p = sub.add_parser("decode", parents=[preamble], help="Captura -> quadros")
    p.add_argument("input", help="Captura (.bin ou .csv)")
    p.add_argument("--output", help="Diretório (ou arquivo com --format raw)")
    p.add_argument("--format", choices=["png", "ppm", "raw"], default="png")
    p.add_argument("--audio-out")
    p.add_argument("--reference", help="Quadros originais para PSNR")
    p.add_argument("--port", type=int)

    p = sub.add_parser("send", help="Transmissão UDP ao vivo")
    p.add_argument("input")
    p.add_argument("--audio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--pace", action="store_true", default=None)
    p.add_argument("--emulate-565", action="store_true", default=None)

    p = sub.add_parser("receive", help="Recepção UDP ao vivo")
    p.add_argument("--port", type=int)
    p.add_argument("--output")
    p.add_argument("--format", choices=["png", "ppm", "raw"], default="png")
    p.add_argument("--capture", help="Grava os pacotes recebidos como captura")
    p.add_argument("--audio-out")
    p.add_argument("--max-packets", type=int)
    p.add_argument("--timeout", type=float, default=2.0)

    p = sub.add_parser("analyze", help="Dissecação de captura")
    p.add_argument("input")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--port", type=int)

    p = sub.add_parser("simulate", parents=[preamble], help="Perda/reordenação de captura")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--drop", type=_positive_fraction)
    p.add_argument("--reorder", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("cycles", help="Modelo de ciclos sobre uma captura")
    p.add_argument("input")
    p.add_argument("--port", type=int)

    sub.add_parser("info", help="Configuração efetiva")
    return parser


def load_config(args: argparse.Namespace) -> CliConfig:
    """Config (ambiente) < --config < flags."""
    Config.validate()

    wire: Dict[str, Any] = {}
    port = getattr(args, "port", None)
    if port is not None and args.command != "send":
        wire["dst_port"] = port
    if getattr(args, "preamble", None) is not None:
        wire["include_preamble"] = args.preamble

    overrides: Dict[str, Any] = {"wire": wire}
    if args.geometry:
        overrides["geometry"] = Geometry.parse(args.geometry)
    if getattr(args, "emulate_565", None):
        overrides["emulate_565"] = True
    if getattr(args, "pace", None):
        overrides["pace"] = True

    impairment = {k: getattr(args, k, None) for k in ("drop", "reorder", "seed")}
    impairment = {k: v for k, v in impairment.items() if v is not None}

    config = CliConfig.from_sources(args.config, **overrides)
    if impairment:
        merged = config.impairment.model_dump()
        merged.update(impairment)
        config = config.model_copy(update={"impairment": ImpairmentConfig(**merged)})
    return config


# Comandos


def _as_result(func):
    """Converte exceções do domínio no dicionário de falha com código de saída."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> Dict[str, Any]:
        try:
            return func(*args, **kwargs)
        except AlwaysCommError as e:
            return {"success": False, "error": str(e), "exit_code": e.exit_code}
        except (OSError, ValueError) as e:
            return {"success": False, "error": f"{type(e).__name__}: {e}", "exit_code": 2}

    return wrapper


@_as_result
def cmd_encode(frames_in, capture_out, audio=None, config: Optional[CliConfig] = None):
    return AlwaysCommSystem(config).encode(frames_in, capture_out, audio)


@_as_result
def cmd_decode(
    capture_in, frames_out=None, fmt="png", audio_out=None, reference=None,
    config: Optional[CliConfig] = None,
):
    return AlwaysCommSystem(config).decode(capture_in, frames_out, fmt, audio_out, reference)


@_as_result
def cmd_send(frames_in, host="127.0.0.1", port=None, audio=None, config: Optional[CliConfig] = None):
    system = AlwaysCommSystem(config)
    return system.send(frames_in, host, port or system.config.wire.dst_port, audio)


@_as_result
def cmd_receive(
    port=None, frames_out=None, capture_out=None, max_packets=None, timeout=2.0,
    fmt="png", audio_out=None, config: Optional[CliConfig] = None,
):
    system = AlwaysCommSystem(config)
    return system.receive(
        port or system.config.wire.dst_port, frames_out, capture_out,
        max_packets, timeout, fmt, audio_out,
    )


@_as_result
def cmd_analyze(capture_in, limit=20, config: Optional[CliConfig] = None):
    return AlwaysCommSystem(config).analyze(capture_in, limit)


@_as_result
def cmd_simulate(
    capture_in, capture_out, drop=None, reorder=None, seed=None,
    config: Optional[CliConfig] = None,
):
    config = config or CliConfig.from_sources()
    changes = {k: v for k, v in (("drop", drop), ("reorder", reorder), ("seed", seed)) if v is not None}
    if changes:
        impairment = ImpairmentConfig(**{**config.impairment.model_dump(), **changes})
        config = config.model_copy(update={"impairment": impairment})
    return AlwaysCommSystem(config).simulate(capture_in, capture_out)


@_as_result
def cmd_cycles(capture_in, config: Optional[CliConfig] = None):
    return AlwaysCommSystem(config).cycles(capture_in)


@_as_result
def cmd_info(config: Optional[CliConfig] = None):
    return AlwaysCommSystem(config).get_system_info()


@_as_result
def run_command(args: argparse.Namespace) -> Dict[str, Any]:
    """Executa o subcomando e devolve o dicionário de resultado."""
    config = load_config(args)
    command = args.command

    if command == "encode":
        return cmd_encode(args.input, args.output, args.audio, config=config)
    if command == "decode":
        return cmd_decode(
            args.input, args.output, args.format, args.audio_out, args.reference, config=config
        )
    if command == "send":
        return cmd_send(args.input, args.host, args.port, args.audio, config=config)
    if command == "receive":
        return cmd_receive(
            args.port, args.output, args.capture, args.max_packets,
            args.timeout, args.format, args.audio_out, config=config,
        )
    if command == "analyze":
        return cmd_analyze(args.input, args.limit, config=config)
    if command == "simulate":
        return cmd_simulate(args.input, args.output, config=config)
    if command == "cycles":
        return cmd_cycles(args.input, config=config)
    if command == "info":
        return cmd_info(config=config)
    raise UsageError(f"Comando desconhecido: {command}")


def save_report(response: Dict[str, Any], path) -> None:
    """JSON para .json; linhas `chave: valor` para qualquer outra extensão."""
    with open(path, "w", encoding="utf-8") as f:
        if Path(path).suffix.lower() == ".json":
            json.dump(response, f, indent=2, ensure_ascii=False, default=str)
        elif response.get("success"):
            f.write(format_report(response.get("report", {})) + "\n")
            for warning in response.get("warnings", []):
                f.write(f"warning: {warning}\n")
        else:
            f.write(f"error: {response.get('error')}\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal da CLI; retorna o código de saída."""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else Config.LOG_LEVEL)

    response = run_command(args)
    display_response(response, f"📡 always_comm {args.command}")

    if args.command == "encode" and response.get("success"):
        columns = ["quadro", "pacotes", "payload médio", "razão", "saturados"]
        rows = [
            (i, f["packets"], f"{f['mean_payload']:.1f}", f"{f['compression_ratio']:.2f}", f["saturated_blocks"])
            for i, f in enumerate(response.get("per_frame", []))
        ]
        print_table("🎞️ Quadros", columns, rows)

    if args.command == "analyze" and response.get("success") and response.get("rows"):
        rows = response["rows"]
        print_table("🔎 Quadros", list(rows[0].keys()), [r.values() for r in rows])

    if args.report:
        try:
            save_report(response, args.report)
        except OSError as e:
            print_info(f"❌ Erro ao gravar relatório: {e}", "error")
            return 2

    if response.get("success"):
        return 0
    return response.get("exit_code", 2)


if __name__ == "__main__":
    sys.exit(main())
