from __future__ import annotations

import csv
import time
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Annotated

from typer import Context, Option, Typer

from torpedo.acceptance import PUBLISHED_RATIOS, run_acceptance, value_ratio_table
from torpedo.classical import SearchConfig
from torpedo.cmd_utils.common_args import (
    SEED_ARG,
    OUTPUT_ARG,
    QUIET_ARG,
    THREADS_ARG,
    VERBOSE_ARG,
    VERSION_ARG,
    EXIT_ASSERTION,
    exit_codes,
    initialise_app,
)
from torpedo.manifest import emit
from torpedo.rich_console import checks_table, summary_table


if TYPE_CHECKING:
    from torpedo.acceptance import RatioRow


logger = logging.getLogger('torpedo')

app = Typer()


def write_ratio_csv(path: Path, rows: list[RatioRow]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['game', 'd', 'quantum', 'classical', 'ratio'])
        for row in rows:
            writer.writerow([row.game, row.d, repr(row.quantum), repr(row.classical), repr(row.ratio)])


@app.command(
    name='report',
    short_help='Run the acceptance suite.',
    help=(
        'Run every acceptance criterion and print a pass/fail table. The perfect classical search '
        '(criterion 9) takes minutes and only runs with --all. Exits with 0 only when every '
        'criterion that ran passed.'
    ),
)
def report(
    ctx: Context,
    run_all: Annotated[bool, Option('--all', help='Include the perfect classical search.')] = False,
    seed: SEED_ARG = 42,
    threads: THREADS_ARG = 1,
    ratios_csv: Annotated[
        Path | None,
        Option('--csv', help='Also write the value-ratio table as CSV.', dir_okay=False, writable=True),
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
        config = SearchConfig(seed=seed, workers=threads)
        results = run_acceptance(include_search=run_all, seed=seed, config=config)
        ratios = value_ratio_table()
        passed = all(r.passed for r in results)

        print(checks_table('Acceptance', [(r.ident, r.name, r.passed, r.detail) for r in results]))
        ratio_rows = []
        for row in ratios:
            published = PUBLISHED_RATIOS.get((row.game, row.d))
            quoted = f' (published {published[0]})' if published else ''
            ratio_rows.append((f'{row.game} d={row.d}', f'{row.ratio:.4f}{quoted}'))
        print(summary_table('Quantum / classical', ratio_rows))
        if ratios_csv is not None:
            write_ratio_csv(ratios_csv, ratios)
            logger.info('Ratio table written to %s', ratios_csv)

        result = {
            'criteria': [
                {'id': r.ident, 'name': r.name, 'passed': r.passed, 'detail': r.detail} for r in results
            ],
            'ratios': [
                {'game': r.game, 'd': r.d, 'quantum': r.quantum, 'classical': r.classical, 'ratio': r.ratio}
                for r in ratios
            ],
            'passed': passed,
        }
        emit(
            'report',
            {'all': run_all},
            result,
            seed=seed,
            wall_time=time.monotonic() - started,
            output=output,
        )
        if not passed:
            failed = ', '.join(r.ident for r in results if not r.passed)
            logger.error('Failed criteria: %s', failed)
            ctx.exit(EXIT_ASSERTION)


__all__ = ('app', 'write_ratio_csv')
