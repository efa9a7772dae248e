"""
Roteador de pacotes recebidos: classifica cada quadro/datagrama pelo byte
de tipo e indica o destino (montagem de vídeo ou fluxo de áudio).
"""

import logging
from typing import Any, Dict, Optional

from .config import Config, WireConfig
from .errors import PacketError
from .packet import parse_datagram, parse_frame

logger = logging.getLogger(__name__)


class PacketRouter:
    """Classificação de pacotes por tipo, no modo quadro completo ou datagrama."""

    TARGETS = {
        "audio": "audio_stream",
        "video": "frame_assembly",
    }

    def __init__(self, wire: Optional[WireConfig] = None, datagram_mode: bool = False):
        self.wire = wire or Config.wire_config()
        self.datagram_mode = datagram_mode
        self.rejected: Dict[str, int] = {}

    def _parse(self, data: bytes):
        if self.datagram_mode:
            return parse_datagram(data)
        return parse_frame(data, self.wire)

    def route(self, data: bytes) -> Dict[str, Any]:
        """
        Roteia um pacote para o destino apropriado.

        Args:
            data: Quadro de fio ou payload UDP

        Returns:
            {"success", "kind", "target", "meta", "payload"} ou
            {"success": False, "error", "reason"}
        """
        try:
            meta, payload = self._parse(data)
        except PacketError as e:
            reason = type(e).__name__
            self.rejected[reason] = self.rejected.get(reason, 0) + 1
            logger.debug("Pacote descartado (%s): %s", reason, e)
            return {"success": False, "error": str(e), "reason": reason}

        kind = Config.KINDS[int(meta.kind)]
        return {
            "success": True,
            "kind": kind,
            "target": self.TARGETS[kind],
            "meta": meta,
            "payload": payload,
        }

    @property
    def rejected_total(self) -> int:
        return sum(self.rejected.values())
