from __future__ import annotations

import logging
from pathlib import Path
from typing import Annotated

from typer import Context, Option, Typer

from torpedo.cmd_utils.common_args import (
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.schemas import write_schemas


logger = logging.getLogger('torpedo')

app = Typer()


@app.command(
    name='schemas',
    short_help='Write the JSON schemas of the interchange documents.',
    help=(
        'Write one versioned JSON schema per document type: behaviour, decomposition, search result '
        'and Wigner grid.'
    ),
)
def schemas(
    ctx: Context,
    folder: Annotated[
        Path,
        Option('--dir', help='Directory to write the schema files into.', file_okay=False),
    ] = Path('schemas'),
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        folder.mkdir(parents=True, exist_ok=True)
        for path in write_schemas(folder):
            logger.info('Wrote %s', path)
            print(f'[green]{path}[/green]')


__all__ = ('app',)
