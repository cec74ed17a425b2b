import logging

from typer import Typer

from torpedo.cmd_utils.common_args import VERSION_ARG
from torpedo.commands.ncf import app as ncf_app
from torpedo.commands.report import app as report_app
from torpedo.commands.search import app as search_app
from torpedo.commands.wigner import app as wigner_app
from torpedo.commands.schemas import app as schemas_app
from torpedo.commands.behaviour import app as behaviour_app
from torpedo.commands.quantum_verify import app as quantum_verify_app
from torpedo.commands.classical_value import app as classical_value_app


logger = logging.getLogger('torpedo')


app = Typer(
    name='torpedo',
    help='Values, strategies and contextuality of the torpedo game and related retrieval tasks.',
    no_args_is_help=True,
    add_completion=True,
    rich_markup_mode='rich',
)


@app.callback()
def main(show_version: VERSION_ARG = False):  # noqa: FBT002
    pass


app.add_typer(classical_value_app)
app.add_typer(quantum_verify_app)
app.add_typer(search_app)
app.add_typer(behaviour_app)
app.add_typer(ncf_app)
app.add_typer(wigner_app)
app.add_typer(report_app)
app.add_typer(schemas_app)


if __name__ == '__main__':
    app()
