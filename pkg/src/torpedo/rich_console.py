from __future__ import annotations

from typing import TYPE_CHECKING, Any

from rich.console import Console
from rich.table import Table


if TYPE_CHECKING:
    from collections.abc import Iterable


class StderrConsole(Console):
    """
    Console for everything human-facing: banners, tables and log records.

    stdout is reserved for the JSON result document.
    """

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault('stderr', True)
        kwargs.setdefault('highlight', False)
        kwargs.setdefault('soft_wrap', True)
        super().__init__(**kwargs)


def summary_table(title: str, rows: Iterable[tuple[str, Any]]) -> Table:
    """Two-column key/value table for the end-of-command summary."""
    table = Table(title=title, show_header=False, title_justify='left')
    table.add_column(style='bold')
    table.add_column()
    for key, value in rows:
        table.add_row(key, str(value))
    return table


def checks_table(title: str, rows: Iterable[tuple[str, str, bool, str]]) -> Table:
    """Pass/fail table with one row per ``(id, name, passed, detail)``."""
    table = Table(title=title, title_justify='left')
    table.add_column('#', justify='right')
    table.add_column('Check')
    table.add_column('Result')
    table.add_column('Detail', overflow='fold')
    for ident, name, passed, detail in rows:
        result = '[bold green]pass[/bold green]' if passed else '[bold red]FAIL[/bold red]'
        table.add_row(ident, name, result, detail)
    return table


__all__ = (
    'StderrConsole',
    'checks_table',
    'summary_table',
)
