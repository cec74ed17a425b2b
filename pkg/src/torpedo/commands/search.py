from __future__ import annotations

import logging
from typing import Annotated

from typer import Context, Option, Typer

from torpedo.classical import SearchConfig, random_search_perfect
from torpedo.cmd_utils.common_args import (
    SEED_ARG,
    OUTPUT_ARG,
    QUIET_ARG,
    THREADS_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    DIMENSION_ARG,
    exit_codes,
    initialise_app,
)
from torpedo.manifest import emit
from torpedo.rich_console import summary_table
from torpedo.schemas import SearchResultModel
from torpedo.tasks import torpedo_task, modified_torpedo_task


logger = logging.getLogger('torpedo')

app = Typer()


@app.command(
    name='search',
    no_args_is_help=True,
    short_help='Hill-climbing search for a perfect classical strategy.',
    help=(
        'Look for a colouring of the d x d input grid in which every colour class avoids one answer '
        'per question. Restarts are split over --threads worker processes, each with its own seed '
        'stream derived from --seed, so the result depends only on the seed and the budget. '
        'Finding nothing is a search outcome, not a proof.'
    ),
)
def search(
    ctx: Context,
    d: DIMENSION_ARG,
    seed: SEED_ARG = 42,
    restarts: Annotated[int, Option('--restarts', help='Restarts across all workers.', min=1)] = 10_000,
    steps: Annotated[int, Option('--steps', help='Moves per restart.', min=1)] = 10_000,
    time_limit: Annotated[float, Option('--time-limit', help='Time budget in seconds.', min=0.01)] = 600.0,
    plateau: Annotated[int, Option('--plateau', help='Sideways moves allowed per restart.', min=1)] = 100,
    threads: THREADS_ARG = 1,
    modified: Annotated[bool, Option('--modified', help='Search the game whose input includes ell.')] = False,
    output: OUTPUT_ARG = None,
    show_version: VERSION_ARG = False,
    verbose: VERBOSE_ARG = 0,
    quiet: QUIET_ARG = 0,
):
    console = initialise_app(ctx)
    print = console.print  # noqa: A001

    with exit_codes(ctx, console):
        config = SearchConfig(
            seed=seed,
            restarts=restarts,
            steps=steps,
            time_limit=time_limit,
            plateau_limit=plateau,
            workers=threads,
        )
        task = modified_torpedo_task(d) if modified else torpedo_task(d)
        logger.info('Searching %s d=%d with %d restarts on %d worker(s)', task.name, d, restarts, threads)
        found = random_search_perfect(task, config)
        model = SearchResultModel.from_result(task, found)

        rows = [
            ('Task', f'{task.name} d={d}'),
            ('Objective', f'{model.objective}/{model.target}'),
            ('Value', model.value),
            ('Encoding', model.encoding),
            ('Restarts', found.statistics.restarts),
            ('Wall time', f'{found.statistics.wall_time:.2f} s'),
            ('Perfect', '[bold green]yes[/bold green]' if found.perfect else '[yellow]no[/yellow]'),
        ]
        if found.statistics.timed_out:
            logger.warning('Time limit of %.1f s reached before the restart budget was spent', time_limit)
        print(summary_table('Classical search', rows))
        emit(
            'search',
            {'d': d, 'modified': modified, 'restarts': restarts, 'steps': steps, 'plateau': plateau},
            model,
            seed=seed,
            wall_time=found.statistics.wall_time,
            output=output,
        )


__all__ = ('app',)
