from __future__ import annotations

import time
import logging
from typing import Annotated

from typer import Context, Option, Typer

from torpedo.cmd_utils.common_args import (
    OUTPUT_ARG,
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    DIMENSION_ARG,
    EXIT_ASSERTION,
    exit_codes,
    initialise_app,
)
from torpedo.errors import DimensionError
from torpedo.manifest import emit
from torpedo.qudit import ASSERTION_TOL
from torpedo.rich_console import summary_table
from torpedo.schemas import TaskModel
from torpedo.tasks import (
    task_value,
    torpedo_task,
    qubit_quantum_value,
    modified_torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    perfect_torpedo_strategy,
    perfect_modified_torpedo_strategy,
)
from torpedo.wigner import negativity, wigner_function


logger = logging.getLogger('torpedo')

app = Typer()

FORBIDDEN_TOL = 1e-12


@app.command(
    name='quantum-verify',
    no_args_is_help=True,
    short_help='Check the quantum strategy for a dimension.',
    help=(
        'Evaluate the quantum torpedo strategy: Weyl translates of the fiducial measured in the '
        'mutually unbiased bases for odd primes, the Pauli strategy for d=2. Exits with 1 when the '
        'strategy does not reach its known value.'
    ),
)
def quantum_verify(
    ctx: Context,
    d: DIMENSION_ARG,
    ell: Annotated[int, Option('--ell', help='Fiducial index for odd d, in [0, (d-1)/2).', min=0)] = 0,
    modified: Annotated[bool, Option('--modified', help='Play the game whose input includes ell.')] = False,
    output: OUTPUT_ARG = None,
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        started = time.monotonic()
        if modified:
            task = modified_torpedo_task(d)
            if not 0 <= ell < (d - 1) // 2:
                raise DimensionError(f'ell must lie in [0, {(d - 1) // 2}) for d={d}')
            strategy = perfect_modified_torpedo_strategy(d)
            expected = 1.0
        elif d == 2:
            task = torpedo_task(2)
            strategy = qubit_torpedo_strategy()
            expected = qubit_quantum_value()
        else:
            task = torpedo_task(d)
            strategy = perfect_torpedo_strategy(d, ell)
            expected = 1.0

        e = behaviour_from_quantum(strategy, task)
        value = task_value(task, e)
        forbidden = e.forbidden_mass()
        wigner_negativity = None
        if d != 2:
            wigner_negativity = max(negativity(wigner_function(rho, d)) for rho in strategy.states)

        result = {
            'task': TaskModel.describe(task),
            'value': value,
            'expected': expected,
            'max_forbidden': forbidden,
            'negativity': wigner_negativity,
        }
        if modified:
            ell_rows = [i for i, inp in enumerate(task.inputs) if inp[2] == ell]
            won = (e.table[ell_rows] * task.winning[ell_rows]).sum()
            result['ell'] = ell
            result['ell_value'] = float(won / (len(ell_rows) * len(task.questions)))

        if d == 2:
            passed = abs(value - expected) <= ASSERTION_TOL
        else:
            passed = abs(value - 1) <= FORBIDDEN_TOL and forbidden <= FORBIDDEN_TOL
        result['passed'] = passed

        elapsed = time.monotonic() - started
        rows = [
            ('Task', f'{task.name} d={d}'),
            ('Value', f'{value:.12f}'),
            ('Max forbidden', f'{forbidden:.2e}'),
            ('Negativity', 'n/a' if wigner_negativity is None else f'{wigner_negativity:.6f}'),
            ('Result', '[bold green]pass[/bold green]' if passed else '[bold red]FAIL[/bold red]'),
        ]
        print(summary_table('Quantum strategy', rows))
        emit(
            'quantum-verify',
            {'d': d, 'ell': ell, 'modified': modified},
            result,
            wall_time=elapsed,
            output=output,
        )
        if not passed:
            logger.error('Quantum value %.12f does not reach the expected %.12f', value, expected)
            ctx.exit(EXIT_ASSERTION)


__all__ = ('app',)
