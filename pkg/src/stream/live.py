"""
Envio e recepção ao vivo por sockets UDP.

O sistema operacional fornece Ethernet/IPv4/UDP; o datagrama começa no
byte de tipo. No envio, uma thread produtora (codec) alimenta uma fila
limitada e a thread chamadora escreve no socket, na ordem da fila; com a
fila cheia, o codec espera.
"""

import logging
import queue
import socket
import threading
import time
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from ..config import Config
from ..packet import PacketMeta, build_datagram, wire_seconds
from ..router import PacketRouter
from .reassembly import Payload, Reassembler, ReassemblyResult, payload_bytes

logger = logging.getLogger(__name__)

_DONE = object()
DEFAULT_QUEUE_SIZE = 64
RECV_BUFFER = 1 << 20


@dataclass
class SendReport:
    packets: int = 0
    bytes: int = 0
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"packets": self.packets, "bytes": self.bytes, "seconds": self.seconds}


class UdpSender:
    def __init__(
        self,
        host: str,
        port: int = Config.DST_PORT,
        pace: bool = False,
        queue_size: int = DEFAULT_QUEUE_SIZE,
        sock: Optional[socket.socket] = None,
    ):
        self.address = (host, port)
        self.pace = pace
        self.queue_size = queue_size
        self.sock = sock or socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, packets: Iterable[Tuple[PacketMeta, Payload]]) -> SendReport:
        """
        Envia todos os pacotes na ordem recebida.

        Args:
            packets: Pares (meta, payload), tipicamente um gerador do codec

        Returns:
            SendReport com contagens e duração
        """
        pending: "queue.Queue[Any]" = queue.Queue(maxsize=self.queue_size)
        errors: List[BaseException] = []

        def produce():
            try:
                for meta, payload in packets:
                    pending.put(build_datagram(meta, payload_bytes(payload)))
            except BaseException as e:  # repassada à thread chamadora
                errors.append(e)
            finally:
                pending.put(_DONE)

        producer = threading.Thread(target=produce, name="codec-producer", daemon=True)
        report = SendReport()
        start = time.perf_counter()
        producer.start()

        while True:
            item = pending.get()
            if item is _DONE:
                break
            self.sock.sendto(item, self.address)
            report.packets += 1
            report.bytes += len(item)
            if self.pace:
                time.sleep(wire_seconds(len(item) - 2))

        producer.join()
        report.seconds = time.perf_counter() - start
        if errors:
            raise errors[0]
        logger.info("%d pacotes enviados para %s:%d", report.packets, *self.address)
        return report

    def close(self) -> None:
        self.sock.close()

    def __enter__(self) -> "UdpSender":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class UdpReceiver:
    def __init__(
        self,
        port: int = Config.DST_PORT,
        host: str = "0.0.0.0",
        timeout: float = 2.0,
    ):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, RECV_BUFFER)
        self.sock.bind((host, port))
        self.sock.settimeout(timeout)

    @property
    def port(self) -> int:
        return self.sock.getsockname()[1]

    def datagrams(self, max_packets: Optional[int] = None) -> Iterator[bytes]:
        """Datagramas até `max_packets` ou até o socket ficar ocioso pelo timeout."""
        count = 0
        while max_packets is None or count < max_packets:
            try:
                data, _ = self.sock.recvfrom(65535)
            except socket.timeout:
                logger.debug("Receptor ocioso após %d datagramas", count)
                return
            count += 1
            yield data

    def receive(
        self, reassembler: Optional[Reassembler] = None, max_packets: Optional[int] = None
    ) -> ReassemblyResult:
        reassembler = reassembler or Reassembler(router=PacketRouter(datagram_mode=True))
        for data in self.datagrams(max_packets):
            reassembler.push_raw(data)
        return reassembler.finish()

    def close(self) -> None:
        self.sock.close()

    def __enter__(self) -> "UdpReceiver":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
