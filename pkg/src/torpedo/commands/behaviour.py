from __future__ import annotations

import time
import logging
from enum import StrEnum
from typing import TYPE_CHECKING, Annotated

from typer import Context, Option, Typer

from torpedo.classical import strategy_from_encoding, exhaustive_classical_value
from torpedo.cmd_utils.common_args import (
    OUTPUT_ARG,
    QUIET_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    DIMENSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.errors import DimensionError
from torpedo.manifest import emit
from torpedo.rich_console import summary_table
from torpedo.schemas import BehaviourModel
from torpedo.tasks import (
    EmpiricalBehaviour,
    task_value,
    torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    behaviour_from_classical,
    perfect_torpedo_strategy,
    postquantum_qubit_torpedo_strategy,
)


if TYPE_CHECKING:
    from torpedo.tasks import RetrievalTask


logger = logging.getLogger('torpedo')

app = Typer()


class StrategyChoice(StrEnum):
    perfect_quantum = 'perfect-quantum'
    qubit_quantum = 'qubit-quantum'
    postquantum_qubit = 'postquantum-qubit'
    optimal_classical = 'optimal-classical'
    uniform = 'uniform'


def _require_qubit(choice: StrategyChoice, d: int) -> None:
    if d != 2:
        raise DimensionError(f'{choice.value} is a qubit strategy; use --d 2')


def strategy_behaviour(choice: StrategyChoice, task: RetrievalTask, ell: int = 0) -> EmpiricalBehaviour:
    """Behaviour of a named strategy on the torpedo task."""
    match choice:
        case StrategyChoice.perfect_quantum:
            return behaviour_from_quantum(perfect_torpedo_strategy(task.d, ell), task)
        case StrategyChoice.qubit_quantum:
            _require_qubit(choice, task.d)
            return behaviour_from_quantum(qubit_torpedo_strategy(), task)
        case StrategyChoice.postquantum_qubit:
            _require_qubit(choice, task.d)
            return behaviour_from_quantum(postquantum_qubit_torpedo_strategy(), task)
        case StrategyChoice.optimal_classical:
            _, witness = exhaustive_classical_value(task)
            return behaviour_from_classical(strategy_from_encoding(witness, task), task)
        case StrategyChoice.uniform:
            return EmpiricalBehaviour.uniform(task)


@app.command(
    name='behaviour',
    no_args_is_help=True,
    short_help='Export the behaviour of a named strategy.',
    help=(
        'Write the outcome table p(answer | input, question) of a named torpedo strategy as a '
        'versioned behaviour document, the input format of the ncf command. --mix blends in the '
        'uniform behaviour with the given weight.'
    ),
)
def behaviour(
    ctx: Context,
    d: DIMENSION_ARG,
    strategy: Annotated[StrategyChoice, Option('--strategy', help='Strategy to evaluate.')],
    ell: Annotated[int, Option('--ell', help='Fiducial index of the perfect quantum strategy.', min=0)] = 0,
    mix: Annotated[
        float | None,
        Option('--mix', help='Weight of uniform noise mixed into the behaviour.', min=0.0, max=1.0),
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
        task = torpedo_task(d)
        e = strategy_behaviour(strategy, task, ell)
        source = strategy.value
        if mix is not None:
            e = e.mix(EmpiricalBehaviour.uniform(task), mix)
            source = f'{source}+uniform:{mix:g}'
        if e.quasi:
            logger.warning('Behaviour has negative entries and is marked quasi; ncf will reject it')

        model = BehaviourModel.from_behaviour(e, source=source)
        elapsed = time.monotonic() - started
        rows = [
            ('Task', f'{task.name} d={d}'),
            ('Source', source),
            ('Value', f'{task_value(task, e):.12f}'),
            ('Max forbidden', f'{e.forbidden_mass():.2e}'),
            ('Quasi', e.quasi),
        ]
        print(summary_table('Behaviour', rows))
        emit(
            'behaviour',
            {'d': d, 'strategy': strategy.value, 'ell': ell, 'mix': mix},
            model,
            wall_time=elapsed,
            output=output,
        )


__all__ = ('StrategyChoice', 'app', 'strategy_behaviour')
