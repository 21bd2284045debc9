"""Command line interface: `posilab analyze`, `posilab batch` and `posilab config`.

Reports go to stdout, errors go to stderr as `{"error": {"code": ..., "message": ...}}`.
Exit codes: 0 classified, 1 usage or parse error, 2 not a selfmap, 3 internal
cross-check mismatch.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from posilab import __version__
from posilab.exceptions import (
    InternalCrossCheckMismatch,
    NotASelfmap,
    PosilabException,
)
from posilab.report import RunOptions, batch, dumps, error_record, parse_map_spec, render_text, run
from posilab.util.config import Config, print_config
from posilab.util.consts import (
    EXIT_MISMATCH,
    EXIT_NOT_SELFMAP,
    EXIT_OK,
    EXIT_USAGE,
    MAX_TRUNCATION,
)
from posilab.util.logger import setup_logger

log = logging.getLogger(__name__)

VERIFY_LADDER = "16,32,64,128"


class PosilabGroup(click.Group):
    """Click group that maps usage errors onto exit code 1 with a JSON error."""

    def main(self, *args, standalone_mode: bool = True, **kwargs):
        """Run the group; in standalone mode exit with the command's code."""
        try:
            code = super().main(*args, standalone_mode=False, **kwargs)
        except click.ClickException as err:
            if not standalone_mode:
                raise
            payload = {"code": "usage_error", "message": err.format_message()}
            click.echo(dumps({"error": payload}), err=True)
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            if not standalone_mode:
                raise
            # Exit code for Ctrl-C
            sys.exit(130)
        if not standalone_mode:
            return code
        sys.exit(code or EXIT_OK)


def _parse_ladder(_ctx, _param, value: Optional[str]) -> Optional[Tuple[int, ...]]:
    if value is None:
        return None
    try:
        ladder = tuple(sorted({int(item) for item in value.split(",") if item.strip()}))
    except ValueError as err:
        raise click.BadParameter(f"{value!r} is no comma separated list of orders") from err
    if not ladder or not all(2 <= order <= MAX_TRUNCATION for order in ladder):
        raise click.BadParameter(f"orders must lie in [2, {MAX_TRUNCATION}]")
    return ladder


def report_options(command):
    """Options shared by `analyze` and `batch`."""

    @click.option(
        "--exact/--float",
        "exact",
        default=None,
        help="Arithmetic backend (default from config).",
    )
    @click.option(
        "--verify",
        "ladder",
        is_flag=False,
        flag_value=VERIFY_LADDER,
        default=None,
        callback=_parse_ladder,
        help=f"Verify with finite sections, optionally `--verify=N1,N2,...` "
        f"(default {VERIFY_LADDER}).",
    )
    @click.option(
        "--format",
        "output_format",
        type=click.Choice(["json", "text"]),
        default="json",
        show_default=True,
        help="Report format.",
    )
    @click.option(
        "--csv-dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Dump every residual trace as CSV into this directory.",
    )
    @click.option(
        "--canonical",
        is_flag=True,
        default=False,
        help="Omit the timing field for byte-stable JSON.",
    )
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        return command(*args, **kwargs)

    return wrapper


def _run_options(
    exact: Optional[bool], ladder: Optional[Tuple[int, ...]], csv_dir: Optional[Path]
) -> RunOptions:
    if exact is None:
        exact = Config.conf["backend"] == "exact"
    return RunOptions(exact=exact, ladder=ladder, csv_dir=csv_dir)


def _fail(ctx: click.Context, err: PosilabException, code: int):
    click.echo(dumps({"error": error_record(err)}), err=True)
    ctx.exit(code)


@click.group(cls=PosilabGroup)
@click.version_option(__version__, prog_name="posilab")
@click.option("--dev", is_flag=True, default=False, help="Run in development mode.")
@click.option(
    "--eps",
    type=click.FloatRange(min=0, min_open=True),
    default=None,
    help="Tolerance of float backend decisions.",
)
@click.option("-v", "--verbose", is_flag=True, default=False, help="Log info records.")
def cli(dev: bool, eps: Optional[float], verbose: bool):
    """Decide posinormality, coposinormality and hyponormality of C_phi."""
    Config(development_mode=True if dev else None, eps=eps)
    setup_logger(verbose)


@cli.command()
@click.argument("spec")
@report_options
@click.pass_context
def analyze(
    ctx: click.Context,
    spec: str,
    exact: Optional[bool],
    ladder: Optional[Tuple[int, ...]],
    output_format: str,
    csv_dir: Optional[Path],
    canonical: bool,
):
    """Classify the map given by SPEC, e.g. `parabolic:t=1/2`.

    Place `--verify` after SPEC or give its ladder as `--verify=16,32`.
    """
    options = _run_options(exact, ladder, csv_dir)
    try:
        envelope = run(parse_map_spec(spec, options.exact), options)
    except NotASelfmap as err:
        _fail(ctx, err, EXIT_NOT_SELFMAP)
    except InternalCrossCheckMismatch as err:
        _fail(ctx, err, EXIT_MISMATCH)
    except PosilabException as err:
        _fail(ctx, err, EXIT_USAGE)
    else:
        if output_format == "text":
            click.echo(render_text(envelope), nl=False)
        else:
            click.echo(dumps(envelope.to_json(canonical)))
    return EXIT_OK


@cli.command(name="batch")
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@report_options
@click.option("-j", "--jobs", type=click.IntRange(min=1), default=1, help="Worker threads.")
@click.pass_context
def batch_command(
    ctx: click.Context,
    path: Path,
    exact: Optional[bool],
    ladder: Optional[Tuple[int, ...]],
    output_format: str,
    csv_dir: Optional[Path],
    canonical: bool,
    jobs: int,
):
    """Classify every JSON-lines record of PATH; failures are reported inline."""
    options = _run_options(exact, ladder, csv_dir)
    mismatch = False
    for outcome in batch(path, options, jobs):
        if outcome.error is not None:
            mismatch |= outcome.error["code"] == "internal_cross_check_mismatch"
        if output_format == "text":
            if outcome.envelope is not None:
                click.echo(render_text(outcome.envelope))
            else:
                click.echo(f"Line {outcome.line}: {outcome.error['message']}\n")
        else:
            click.echo(dumps(outcome.to_json(canonical)))
    ctx.exit(EXIT_MISMATCH if mismatch else EXIT_OK)


@cli.command(name="config")
def show_config():
    """Print the active configuration."""
    print_config()


def main():
    """Entry point of the `posilab` console script."""
    cli()  # pylint: disable=no-value-for-parameter


if __name__ == "__main__":
    main()
