from __future__ import annotations

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Annotated

from pydantic import ValidationError
from rich.logging import RichHandler
from typer import Exit, Option

from torpedo import __version__
from torpedo.errors import TorpedoError, ConsistencyError
from torpedo.rich_console import StderrConsole


if TYPE_CHECKING:
    from collections.abc import Iterator

    from rich.console import Console
    from typer import Context


DEFAULT_LOG_LEVEL = logging.INFO
EXIT_ASSERTION = 1
EXIT_INVALID = 2


def initialise_app(ctx: Context) -> Console:
    console = StderrConsole()
    print = console.print  # noqa: A001

    verbose: int = ctx.params.get('verbose') or 0
    quiet: int = ctx.params.get('quiet') or 0

    log_level = max(10, min(40, DEFAULT_LOG_LEVEL - (10 * verbose) + (10 * quiet)))

    if not quiet:
        print(f'[bold green]Torpedo Game Toolkit[/bold green] [dim]{ctx.info_name}[/dim]')
    if verbose or quiet:
        print(f'[bold]Log Level:[/bold] {log_level} ({logging.getLevelName(log_level)})')

    # Setup logging
    logging.basicConfig(
        level=log_level,
        format='%(message)s',
        handlers=[
            RichHandler(
                log_level,
                console,
                show_time=False,
            ),
        ],
    )
    logging.getLogger('torpedo').setLevel(log_level)

    return console


@contextmanager
def exit_codes(ctx: Context, console: Console) -> Iterator[None]:
    """Map failed identities to exit code 1 and rejected input to exit code 2."""
    try:
        yield
    except ConsistencyError as exc:
        console.print(f'[bold red]Check failed:[/bold red] {exc}')
        ctx.exit(EXIT_ASSERTION)
    except (TorpedoError, ValidationError) as exc:
        console.print(f'[bold red]Invalid input:[/bold red] {exc}')
        ctx.exit(EXIT_INVALID)


def _handle_version_option(value: str) -> None:
    if not value:
        return
    print(__version__)
    raise Exit(0)


VERBOSE_ARG = Annotated[
    int,
    Option(
        '-v',
        '--verbose',
        help='Increase output verbosity. May be specified multiple times.',
        metavar='',
        count=True,
        show_default=False,
    ),
]

QUIET_ARG = Annotated[
    int,
    Option(
        '-q',
        '--quiet',
        help='Reduce output verbosity. May be specified multiple times.',
        metavar='',
        count=True,
        show_default=False,
    ),
]

VERSION_ARG = Annotated[
    bool,
    Option(
        '--version',
        help='Show the version and exit',
        is_eager=True,
        callback=_handle_version_option,
    ),
]

DIMENSION_ARG = Annotated[
    int,
    Option(
        '-d',
        '--d',
        help='Dimension of the qudit, a prime.',
        min=2,
    ),
]

SEED_ARG = Annotated[
    int,
    Option(
        '--seed',
        help='Seed for every random choice made by the command.',
        min=1,
        max=2**64 - 1,
    ),
]

THREADS_ARG = Annotated[
    int,
    Option(
        '--threads',
        help='Worker processes for the search.',
        envvar='TORPEDO_THREADS',
        min=1,
    ),
]

OUTPUT_ARG = Annotated[
    Path | None,
    Option(
        '-o',
        '--output',
        help='Also write the result document to this file.',
        dir_okay=False,
        writable=True,
    ),
]

__all__ = (
    'DEFAULT_LOG_LEVEL',
    'DIMENSION_ARG',
    'EXIT_ASSERTION',
    'EXIT_INVALID',
    'OUTPUT_ARG',
    'QUIET_ARG',
    'SEED_ARG',
    'THREADS_ARG',
    'VERBOSE_ARG',
    'VERSION_ARG',
    'exit_codes',
    'initialise_app',
)
