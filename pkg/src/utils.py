"""
Utilitários para exibição e formatação no terminal.
"""

import logging
from typing import Any, Dict, Iterable, Optional

try:
    from rich.console import Console
    from rich.logging import RichHandler
    from rich.panel import Panel
    from rich.table import Table
    from rich.text import Text
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

# Console global
console = Console(stderr=False) if RICH_AVAILABLE else None


def setup_logging(level: str = "INFO") -> None:
    """
    Configura o logging da aplicação (somente a CLI chama esta função).

    Args:
        level: Nível de log (DEBUG, INFO, WARNING, ...)
    """
    handlers = None
    fmt = "%(name)s: %(message)s"
    if RICH_AVAILABLE:
        handlers = [RichHandler(rich_tracebacks=True, show_path=False)]
    else:
        fmt = "[%(levelname)s] " + fmt

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=fmt,
        handlers=handlers,
        force=True,
    )


def print_info(message: str, style: str = "info") -> None:
    """
    Exibe mensagem informativa com estilo.

    Args:
        message: Mensagem a ser exibida
        style: Estilo da mensagem (info, success, warning, error)
    """
    if not RICH_AVAILABLE:
        print(f"[{style.upper()}] {message}")
        return

    styles = {
        "info": "blue",
        "success": "green",
        "warning": "yellow",
        "error": "red"
    }

    style_color = styles.get(style, "white")
    console.print(f"[{style_color}]{message}[/{style_color}]")


def print_header(title: str) -> None:
    """Exibe cabeçalho estilizado."""
    if not RICH_AVAILABLE:
        print(f"\n{'='*60}")
        print(f"{title.center(60)}")
        print("="*60)
        return

    text = Text(title, style="bold magenta", justify="center")
    panel = Panel(text, border_style="magenta")
    console.print(panel)


def print_separator() -> None:
    if not RICH_AVAILABLE:
        print("-" * 60)
        return

    console.print("-" * 80, style="dim")


def print_table(title: str, columns: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    """
    Exibe uma tabela simples.

    Args:
        title: Título da tabela
        columns: Nomes das colunas
        rows: Linhas (cada célula é convertida com str)
    """
    columns = list(columns)
    rows = [[str(cell) for cell in row] for row in rows]

    if not RICH_AVAILABLE:
        print(title)
        print(" | ".join(columns))
        for row in rows:
            print(" | ".join(row))
        return

    table = Table(title=title, header_style="bold blue")
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*row)
    console.print(table)


def format_report(report: Dict[str, Any]) -> str:
    """Converte um relatório em linhas `chave: valor` (texto simples)."""
    lines = []
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.4f}"
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def display_response(response: Dict[str, Any], title: Optional[str] = None) -> None:
    """
    Exibe o resultado de um comando de forma formatada.

    Args:
        response: Resultado do comando ({"success": ..., "report": {...}})
        title: Título do painel
    """
    print_separator()
    print_header(title or "📡 always_comm")

    if response.get("success"):
        report = response.get("report", {})
        print_table(
            "📊 Relatório",
            ["campo", "valor"],
            [(k, f"{v:.4f}" if isinstance(v, float) else v) for k, v in report.items()],
        )
        for warning in response.get("warnings", []):
            print_info(f"⚠️ {warning}", "warning")
    else:
        error_msg = response.get("error", "Erro desconhecido")
        print_info(f"❌ {error_msg}", "error")

    print_separator()
