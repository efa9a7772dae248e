"""
Hierarquia de exceções do always_comm.

Cada classe carrega o código de saída usado pela CLI:
1 uso, 2 validação/IO, 3 protocolo.
"""


class AlwaysCommError(Exception):
    exit_code = 2


class ConfigError(AlwaysCommError, ValueError):
    exit_code = 1


class UsageError(AlwaysCommError):
    exit_code = 1


# Codec


class CodecError(AlwaysCommError):
    exit_code = 3


class InvalidGeometryError(CodecError, ValueError):
    exit_code = 2


class CategoryRangeError(CodecError, ValueError):
    pass


class InvalidSymbolError(CodecError):
    pass


class MalformedStreamError(CodecError):
    pass


class StreamExhaustedError(MalformedStreamError):
    pass


class InvariantViolation(CodecError):
    pass


class PayloadOverflowError(CodecError):
    """O fluxo de palavras de um pacote não cabe no payload UDP."""


# Pacotes


class PacketError(AlwaysCommError):
    exit_code = 3


class ChecksumError(PacketError):
    pass


class NotOursError(PacketError):
    pass


class MalformedFrameError(PacketError):
    pass


class PayloadTooLargeError(PacketError, ValueError):
    pass
