from __future__ import annotations

import time
import logging
from enum import StrEnum
from typing import TYPE_CHECKING, Annotated

from typer import Context, Option, Typer

from torpedo.classical import encoding_value, exhaustive_classical_value
from torpedo.cmd_utils.common_args import (
    OUTPUT_ARG,
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    DIMENSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.json_utils import fraction_to_str
from torpedo.manifest import emit
from torpedo.rich_console import summary_table
from torpedo.schemas import TaskModel
from torpedo.tasks import qrac_task, torpedo_task, modified_torpedo_task


if TYPE_CHECKING:
    from torpedo.tasks import RetrievalTask


logger = logging.getLogger('torpedo')

app = Typer()


class TaskChoice(StrEnum):
    torpedo = 'torpedo'
    qrac = 'qrac'
    modified = 'modified'


def build_task(choice: TaskChoice, d: int, n: int = 2) -> RetrievalTask:
    match choice:
        case TaskChoice.torpedo:
            return torpedo_task(d)
        case TaskChoice.qrac:
            return qrac_task(n, d)
        case TaskChoice.modified:
            return modified_torpedo_task(d)


@app.command(
    name='classical-value',
    no_args_is_help=True,
    short_help='Exact classical value by exhaustive search over colourings.',
    help=(
        'Scan every encoding of the inputs into d messages (up to relabelling), decode optimally and '
        'report the best winning probability as an exact fraction with a witness colouring.'
    ),
)
def classical_value(
    ctx: Context,
    d: DIMENSION_ARG,
    task: Annotated[TaskChoice, Option('--task', help='Retrieval task to evaluate.')] = TaskChoice.torpedo,
    n: Annotated[int, Option('--n', help='Number of input dits for the random access code.', min=2)] = 2,
    output: OUTPUT_ARG = None,
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        started = time.monotonic()
        retrieval = build_task(task, d, n)
        value, witness = exhaustive_classical_value(retrieval)
        score = encoding_value(witness, retrieval)

        result = {
            'task': TaskModel.describe(retrieval),
            'value': fraction_to_str(value),
            'value_float': float(value),
            'witness': str(witness),
            'decoding': score.decoding.tolist(),
            'perfect': value == 1,
        }
        elapsed = time.monotonic() - started
        rows = [('Task', f'{retrieval.name} d={d}'), ('Value', value), ('Witness', witness)]
        print(summary_table('Classical value', rows))
        emit(
            'classical-value',
            {'task': task.value, 'd': d, 'n': n},
            result,
            wall_time=elapsed,
            output=output,
        )


__all__ = ('app', 'build_task')
