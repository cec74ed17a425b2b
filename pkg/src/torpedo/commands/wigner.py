from __future__ import annotations

import time
import logging
from pathlib import Path
from typing import Annotated

from rich.table import Table
from typer import Context, Option, Typer

from torpedo.cmd_utils.common_args import (
    OUTPUT_ARG,
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    DIMENSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.cmd_utils.state_spec import parse_state
from torpedo.manifest import emit
from torpedo.schemas import WignerGridModel
from torpedo.wigner import WignerGrid, negativity, wigner_function


logger = logging.getLogger('torpedo')

app = Typer()


def grid_table(grid: WignerGrid, title: str) -> Table:
    table = Table(title=title, title_justify='left')
    table.add_column('x \\ z', style='bold', justify='right')
    for z in range(grid.d):
        table.add_column(str(z), justify='right')
    for x, row in enumerate(grid.values):
        cells = [f'[red]{v:+.4f}[/red]' if v < 0 else f'{v:+.4f}' for v in row]
        table.add_row(str(x), *cells)
    return table


@app.command(
    name='wigner',
    no_args_is_help=True,
    short_help='Discrete Wigner function of a state.',
    help=(
        'Evaluate W(x, z) = Tr(A(x, z) rho) / d on the d x d phase space of an odd prime dimension. '
        'States: psi:x,z[,ell] (torpedo message state), basis:q,k (MUB vector, q may be inf), mixed, '
        'or ket:a0,a1,... (real amplitudes, normalised).'
    ),
)
def wigner(
    ctx: Context,
    d: DIMENSION_ARG,
    state: Annotated[str, Option('--state', help='State specification, for example psi:2,0.')],
    csv: Annotated[
        Path | None,
        Option('--csv', help='Also write the grid as CSV, one row per x.', dir_okay=False, writable=True),
    ] = None,
    output: OUTPUT_ARG = None,
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        started = time.monotonic()
        rho = parse_state(state, d)
        grid = wigner_function(rho, d)
        total = negativity(grid)

        print(grid_table(grid, f'W({state}), d={d}, sum |W| = {total:.6f}'))
        if csv is not None:
            grid.to_csv(csv)
            logger.info('Grid written to %s', csv)

        emit(
            'wigner',
            {'d': d, 'state': state},
            WignerGridModel.from_grid(grid, state, total),
            wall_time=time.monotonic() - started,
            output=output,
        )


__all__ = ('app', 'grid_table')
