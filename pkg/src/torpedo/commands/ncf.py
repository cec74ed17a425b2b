from __future__ import annotations

import time
import logging
from enum import StrEnum
from pathlib import Path
from typing import Annotated

from typer import Context, Option, Typer

from torpedo.classical import MAX_EXHAUSTIVE_DIMENSION, exhaustive_classical_value
from torpedo.cmd_utils.common_args import (
    SEED_ARG,
    OUTPUT_ARG,
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.contextuality import ncf, failure_bound_check, strong_contextuality_check
from torpedo.json_utils import fraction_to_str
from torpedo.manifest import emit
from torpedo.rich_console import summary_table
from torpedo.schemas import DecompositionModel, load_behaviour


logger = logging.getLogger('torpedo')

app = Typer()


class MethodChoice(StrEnum):
    auto = 'auto'
    enumerate = 'enumerate'
    column_generation = 'column-generation'


@app.command(
    name='ncf',
    no_args_is_help=True,
    short_help='Noncontextual fraction of a behaviour file.',
    help=(
        'Solve the linear program for the largest weight of deterministic noncontextual behaviours '
        'inside the given behaviour. Reports the convex decomposition, the dual certificate and, for '
        'torpedo behaviours with d <= 3, the bound failure >= ncf * (1 - classical value).'
    ),
)
def ncf_command(
    ctx: Context,
    behaviour: Annotated[
        Path,
        Option(
            '--behaviour',
            help='Behaviour document as written by the behaviour command.',
            exists=True,
            dir_okay=False,
            readable=True,
        ),
    ],
    method: Annotated[MethodChoice, Option('--method', help='LP formulation.')] = MethodChoice.auto,
    seed: SEED_ARG = 42,
    output: OUTPUT_ARG = None,
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        started = time.monotonic()
        e = load_behaviour(behaviour)
        task = e.task
        decomposition = ncf(e, method.value, seed=seed)
        strongly, witness = strong_contextuality_check(e)
        if witness is not None:
            logger.debug('Vertex inside the support: %s %s', witness.encoding, witness.decoding_string())

        model = DecompositionModel.from_result(decomposition, strongly_contextual=strongly)
        result = model.model_dump(mode='json')
        rows = [
            ('Task', f'{task.name} d={task.d}'),
            ('NCF', f'{decomposition.ncf:.9f}'),
            ('CF', f'{decomposition.cf:.9f}'),
            ('Method', f'{decomposition.method} ({decomposition.iterations} iterations)'),
            ('Strongly contextual', strongly),
        ]

        if task.name == 'torpedo' and task.d <= MAX_EXHAUSTIVE_DIMENSION:
            classical, _ = exhaustive_classical_value(task)
            report = failure_bound_check(e, task, classical, decomposition.ncf)
            result['bound'] = {
                'classical_value': fraction_to_str(classical),
                'epsilon': report.epsilon,
                'nu': report.nu,
                'slack': report.slack,
                'holds': report.holds,
            }
            rows.append(('Failure bound', f'{report.epsilon:.9f} >= {report.ncf * report.nu:.9f}'))

        elapsed = time.monotonic() - started
        print(summary_table('Contextual fraction', rows))
        emit(
            'ncf',
            {'behaviour': behaviour.name, 'method': method.value},
            result,
            seed=seed,
            wall_time=elapsed,
            output=output,
        )


__all__ = ('MethodChoice', 'app')
