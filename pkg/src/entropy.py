"""
Codificação de entropia dos blocos quantizados: representação por
categorias, run-length com ZRL/EOB e códigos de Huffman do padrão JPEG,
com o decodificador exato correspondente.

O DC é codificado pelo valor bruto (sem diferença entre blocos) e todo
bloco termina com EOB, inclusive quando o coeficiente 63 é não nulo.
"""

import json
import logging
import os
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    CategoryRangeError,
    ConfigError,
    InvalidSymbolError,
    MalformedStreamError,
    StreamExhaustedError,
)
from .frame_prep import Channel
from .quant_zigzag import QuantizedBlock

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

DC_MAX_MAGNITUDE = 2047
AC_MAX_MAGNITUDE = 1023
MAX_CODE_LEN = 16


class RleSymbol(NamedTuple):
    r: int  # corrida de zeros, 4 bits
    n: int  # categoria
    v: int = 0

    @property
    def index(self) -> int:
        return (self.r << 4) | self.n


ZRL = RleSymbol(15, 0)
EOB = RleSymbol(0, 0)


class CodedUnit(NamedTuple):
    codeword: int
    codeword_len: int
    value_bits: int
    value_len: int
    end_of_block: bool = False


class TableClass(str, Enum):
    DC_LUMA = "dc_luma"
    AC_LUMA = "ac_luma"
    DC_CHROMA = "dc_chroma"
    AC_CHROMA = "ac_chroma"

    @property
    def is_dc(self) -> bool:
        return self in (TableClass.DC_LUMA, TableClass.DC_CHROMA)


def categorize(v: int, max_magnitude: int = DC_MAX_MAGNITUDE) -> Tuple[int, int]:
    """
    Categoria C = floor(log2|V|) + 1 e os C bits que representam V
    (V se positivo, complemento de |V| se negativo).

    Returns:
        (categoria, bits); V = 0 -> (0, 0)
    """
    magnitude = abs(v)
    if magnitude > max_magnitude:
        raise CategoryRangeError(f"|{v}| excede {max_magnitude}")
    category = magnitude.bit_length()
    if v < 0:
        return category, v + (1 << category) - 1
    return category, v


def decategorize(category: int, value_bits: int) -> int:
    if category == 0:
        if value_bits:
            raise MalformedStreamError("Categoria 0 não carrega bits")
        return 0
    if not 0 <= value_bits < (1 << category):
        raise MalformedStreamError(f"Valor {value_bits} não cabe em {category} bits")
    if value_bits >> (category - 1):
        return value_bits
    return value_bits - (1 << category) + 1


class HuffmanTable:
    """Tabela de Huffman: índice (R << 4 | N) -> (código, comprimento)."""

    def __init__(self, table_class: TableClass, codes: Dict[int, Tuple[int, int]]):
        self.table_class = table_class
        self.codes = dict(codes)
        self.lookup = self._build_lookup()

    @property
    def is_dc(self) -> bool:
        return self.table_class.is_dc

    def _build_lookup(self) -> List[Optional[Tuple[int, int]]]:
        # Decodificação por janela de 16 bits: cada código ocupa todas as
        # janelas que começam por ele
        lookup: List[Optional[Tuple[int, int]]] = [None] * (1 << MAX_CODE_LEN)
        for index, (code, length) in sorted(self.codes.items(), key=lambda kv: kv[1][1]):
            if not 1 <= length <= MAX_CODE_LEN or code >> length:
                raise ConfigError(f"{self.table_class.value}: código inválido para índice {index:#04x}")
            start = code << (MAX_CODE_LEN - length)
            span = 1 << (MAX_CODE_LEN - length)
            if any(entry is not None for entry in lookup[start:start + span]):
                raise ConfigError(
                    f"{self.table_class.value}: código do índice {index:#04x} não é livre de prefixo"
                )
            lookup[start:start + span] = [(index, length)] * span
        return lookup

    @classmethod
    def from_bits(
        cls, table_class: TableClass, bits: Sequence[int], values: Sequence[int]
    ) -> "HuffmanTable":
        """Gera os códigos canônicos a partir da descrição BITS/HUFFVAL do JPEG."""
        if len(bits) != MAX_CODE_LEN or sum(bits) != len(values):
            raise ConfigError(f"{table_class.value}: BITS/HUFFVAL inconsistentes")
        codes = {}
        code = 0
        it = iter(values)
        for length, count in enumerate(bits, start=1):
            for _ in range(count):
                codes[next(it)] = (code, length)
                code += 1
            code <<= 1
        return cls(table_class, codes)

    @classmethod
    def from_text(cls, table_class: TableClass, path: str) -> "HuffmanTable":
        """
        Lê o formato texto `indice comprimento codigo` (índice em hexadecimal,
        código em binário), uma entrada por linha; # inicia comentário.
        """
        codes = {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                for line_no, line in enumerate(f, start=1):
                    line = line.split("#", 1)[0].strip()
                    if not line:
                        continue
                    index_txt, length_txt, code_txt = line.split()
                    length = int(length_txt)
                    if len(code_txt) != length:
                        raise ConfigError(f"{path}:{line_no}: comprimento não confere")
                    codes[int(index_txt, 16)] = (int(code_txt, 2), length)
        except (OSError, ValueError) as e:
            raise ConfigError(f"Erro ao ler tabela de Huffman {path}: {e}")
        return cls(table_class, codes)

    def to_text(self) -> str:
        lines = [f"# {self.table_class.value}: indice comprimento codigo"]
        for index, (code, length) in sorted(self.codes.items()):
            lines.append(f"{index:02x} {length} {code:0{length}b}")
        return "\n".join(lines) + "\n"


class HuffmanTables(NamedTuple):
    dc_luma: HuffmanTable
    ac_luma: HuffmanTable
    dc_chroma: HuffmanTable
    ac_chroma: HuffmanTable

    def for_channel(self, channel: Channel) -> Tuple[HuffmanTable, HuffmanTable]:
        if channel.is_luma:
            return self.dc_luma, self.ac_luma
        return self.dc_chroma, self.ac_chroma

    @classmethod
    def from_dir(cls, directory) -> "HuffmanTables":
        """Carrega <classe>.txt de um diretório; arquivos ausentes usam o padrão."""
        defaults = default_tables()
        tables = []
        for table_class, default in zip(TableClass, defaults):
            path = Path(directory) / f"{table_class.value}.txt"
            tables.append(HuffmanTable.from_text(table_class, str(path)) if path.exists() else default)
        return cls(*tables)


@lru_cache(maxsize=1)
def default_tables() -> HuffmanTables:
    """Tabelas típicas do anexo K do JPEG (arquivo de dados embutido)."""
    with open(os.path.join(DATA_DIR, "jpeg_tables.json"), "r", encoding="utf-8") as f:
        tables = json.load(f)["huffman"]

    def _values(raw):
        return [int(v, 16) if isinstance(v, str) else int(v) for v in raw]

    return HuffmanTables(*(
        HuffmanTable.from_bits(tc, tables[tc.value]["bits"], _values(tables[tc.value]["values"]))
        for tc in TableClass
    ))


def rle_encode_block(quantized) -> List[RleSymbol]:
    """
    Converte 64 coeficientes em zigue-zague em símbolos (R, N, V).

    Args:
        quantized: QuantizedBlock ou sequência de 64 inteiros

    Returns:
        DC bruto, símbolos AC (com ZRL antes de corridas > 15) e EOB final
    """
    coeffs = quantized.coeffs if isinstance(quantized, QuantizedBlock) else quantized
    coeffs = coeffs.tolist() if isinstance(coeffs, np.ndarray) else list(coeffs)
    if len(coeffs) != 64:
        raise InvalidSymbolError(f"Bloco com {len(coeffs)} coeficientes")

    dc = coeffs[0]
    symbols = [RleSymbol(0, abs(dc).bit_length(), dc)]
    last = 0
    for idx in range(1, 64):
        v = coeffs[idx]
        if not v:
            continue
        run = idx - last - 1
        while run > 15:
            symbols.append(ZRL)
            run -= 16
        symbols.append(RleSymbol(run, abs(v).bit_length(), v))
        last = idx
    symbols.append(EOB)
    return symbols


def rle_decode(symbols: Iterable[RleSymbol]) -> List[int]:
    """Inversa de rle_encode_block; posições após o EOB ficam zeradas."""
    it = iter(symbols)
    coeffs = [0] * 64
    try:
        coeffs[0] = next(it).v
    except StopIteration:
        raise MalformedStreamError("Bloco sem DC")

    pos = 1
    for sym in it:
        if sym == EOB:
            return coeffs
        if sym == ZRL:
            pos += 16
        else:
            pos += sym.r
            if pos > 63:
                break
            coeffs[pos] = sym.v
            pos += 1
        if pos > 64:
            break
    else:
        if pos == 64:
            return coeffs
        raise MalformedStreamError("Bloco terminou sem EOB")
    raise MalformedStreamError("Símbolos excedem 64 coeficientes")


def huffman_encode(symbol: RleSymbol, table: HuffmanTable) -> CodedUnit:
    index = symbol.n if table.is_dc else symbol.index
    try:
        code, length = table.codes[index]
    except KeyError:
        raise InvalidSymbolError(
            f"Índice {index:#04x} ausente em {table.table_class.value}"
        )
    limit = DC_MAX_MAGNITUDE if table.is_dc else AC_MAX_MAGNITUDE
    value_len, value_bits = categorize(symbol.v, limit)
    return CodedUnit(code, length, value_bits, value_len, symbol == EOB and not table.is_dc)


def huffman_decode(reader, table: HuffmanTable) -> int:
    """
    Consome exatamente um código e retorna o índice (R << 4 | N).
    O chamador lê em seguida os N bits do valor.
    """
    entry = table.lookup[reader.peek(MAX_CODE_LEN)]
    if entry is None:
        raise MalformedStreamError(
            f"Nenhum código de {table.table_class.value} casa nos próximos 16 bits"
        )
    index, length = entry
    if length > reader.remaining:
        raise StreamExhaustedError("Código truncado no fim do fluxo")
    reader.skip(length)
    return index


class EntropyCoder:
    """Codificador/decodificador de blocos com as quatro tabelas de Huffman."""

    def __init__(self, tables: Optional[HuffmanTables] = None):
        self.tables = tables or default_tables()

    def pack_block(self, zigzag: np.ndarray, channel: Channel) -> Tuple[int, int]:
        """
        Bits de um bloco inteiro (códigos + valores, MSB primeiro) como
        (valor, comprimento); mesmos bits que encode_block seguido de
        align/append, sem criar objetos por símbolo.
        """
        dc_table, ac_table = self.tables.for_channel(channel)
        dc_codes, ac_codes = dc_table.codes, ac_table.codes

        dc = int(zigzag[0])
        n = abs(dc).bit_length()
        if n > DC_MAX_MAGNITUDE.bit_length():
            raise CategoryRangeError(f"DC {dc} fora da faixa")
        code, length = dc_codes[n]
        bits = (code << n) | (dc if dc >= 0 else dc + (1 << n) - 1)
        nbits = length + n

        zrl_code, zrl_len = ac_codes[0xF0]
        last = 0
        ac = zigzag[1:]
        for idx in (np.flatnonzero(ac) + 1).tolist():
            v = int(zigzag[idx])
            run = idx - last - 1
            while run > 15:
                bits = (bits << zrl_len) | zrl_code
                nbits += zrl_len
                run -= 16
            n = abs(v).bit_length()
            if n > 10:
                raise CategoryRangeError(f"AC {v} excede {AC_MAX_MAGNITUDE}")
            code, length = ac_codes[(run << 4) | n]
            bits = (((bits << length) | code) << n) | (v if v > 0 else v + (1 << n) - 1)
            nbits += length + n
            last = idx

        code, length = ac_codes[0x00]
        return (bits << length) | code, nbits + length

    def encode_block(self, quantized: QuantizedBlock) -> List[CodedUnit]:
        dc_table, ac_table = self.tables.for_channel(quantized.channel)
        symbols = rle_encode_block(quantized)
        units = [huffman_encode(symbols[0], dc_table)]
        units.extend(huffman_encode(sym, ac_table) for sym in symbols[1:])
        return units

    def decode_symbols(self, reader, channel: Channel) -> List[RleSymbol]:
        dc_table, ac_table = self.tables.for_channel(channel)

        n = huffman_decode(reader, dc_table)
        symbols = [RleSymbol(0, n, decategorize(n, reader.read(n)))]

        pos = 1
        while True:
            index = huffman_decode(reader, ac_table)
            r, n = index >> 4, index & 0x0F
            if index == 0x00:
                symbols.append(EOB)
                return symbols
            if pos >= 64:
                raise MalformedStreamError("Bloco completo sem EOB")
            if index == 0xF0:
                symbols.append(ZRL)
                pos += 16
            else:
                symbols.append(RleSymbol(r, n, decategorize(n, reader.read(n))))
                pos += r + 1
            if pos > 64:
                raise MalformedStreamError("Símbolos excedem 64 coeficientes")

    def decode_block(self, reader, channel: Channel) -> QuantizedBlock:
        symbols = self.decode_symbols(reader, channel)
        return QuantizedBlock(
            coeffs=np.array(rle_decode(symbols), dtype=np.int32), channel=channel
        )


def encode_block(quantized: QuantizedBlock) -> List[CodedUnit]:
    return EntropyCoder().encode_block(quantized)


def decode_block(reader, channel: Channel) -> QuantizedBlock:
    return EntropyCoder().decode_block(reader, channel)
