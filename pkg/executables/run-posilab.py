"""Run script for posilab in development. Forwards all arguments to the cli."""

import os
import subprocess  # nosec B404
import sys
from typing import Tuple

import click


@click.command(context_settings={"ignore_unknown_options": True})
@click.option("--dev", is_flag=True, default=False, help="Run in development mode.")
@click.option("--no-poetry", is_flag=True, default=False, help="Don't run poetry.")
@click.argument("cli_args", nargs=-1, type=click.UNPROCESSED)
def main(dev: bool, no_poetry: bool, cli_args: Tuple[str, ...]) -> None:
    """Parse cli-arguments and run posilab, e.g. `run-posilab.py analyze parabolic:t=1/2`."""
    args = ["posilab", *cli_args]
    if not no_poetry:
        args = ["poetry", "run"] + args

    env_vars = os.environ.copy()
    if dev:
        env_vars["POSILAB_DEVELOPMENT_MODE"] = str(dev)

    try:
        completed = subprocess.run(  # nosec B603 B607
            args,
            check=False,
            env=env_vars,
        )
    except KeyboardInterrupt:
        # Exit code for Ctrl-C
        sys.exit(130)
    sys.exit(completed.returncode)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
