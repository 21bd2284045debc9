"""Report envelopes for single maps and JSON-lines batches.

  Typical usage example:

  envelope = run(parse_map_spec("parabolic:t=1/2"), RunOptions(ladder=(16, 32, 64)))
  print(dumps(envelope.to_json(canonical=True)))
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader, select_autoescape

from posilab.classifier import ClassificationReport, classify_report
from posilab.exceptions import PosilabException
from posilab.finite_section import (
    ResidualTrace,
    TraceVerdict,
    coposinormal_witness_residual,
    cowen_residual,
    interrupter_bound_estimate,
    interrupter_residual,
    kernel_action_residual,
    posinormal_witness_residual,
    range_membership_residual,
    residual_trace,
    write_trace_csv,
)
from posilab.mobius import MobiusMap, zero_in_disk
from posilab.report.map_spec import MapSpec, spec_from_json
from posilab.scalars import Cplx
from posilab.util.consts import SCHEMA_VERSION, TEMPLATE_DIR

log = logging.getLogger(__name__)

KERNEL_POINT = 0.5
LAMBDA_ORDER = 64

_environment = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    autoescape=select_autoescape(),
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def _format_point(point) -> str:
    if point is None or isinstance(point, str):
        return str(point)
    real, imag = point
    if isinstance(real, str):
        return str(Cplx(Fraction(real), Fraction(imag)))
    return str(Cplx(real, imag))


_environment.filters["point"] = _format_point


@dataclass(frozen=True)
class RunOptions:
    """Options shared by `run` and `batch`.

    Attributes:
        exact: Use the exact rational backend.
        ladder: Truncation orders for numerical verification, None to skip it.
        csv_dir: Directory receiving one CSV per residual trace.
        csv_prefix: File name prefix for the CSV dumps.
    """

    exact: bool = True
    ladder: Optional[Tuple[int, ...]] = None
    csv_dir: Optional[Path] = None
    csv_prefix: str = ""


@dataclass(frozen=True)
class ReportEnvelope:
    """Versioned result of analysing one map."""

    input: MapSpec
    report: ClassificationReport
    numerics: Optional[List[ResidualTrace]] = None
    timing_ms: float = 0.0
    schema_version: str = SCHEMA_VERSION

    def to_json(self, canonical: bool = False) -> dict:
        """JSON friendly representation; the canonical form omits the timing."""
        data = {
            "schema_version": self.schema_version,
            "input": {
                "spec": self.input.text,
                "backend": "exact" if self.input.exact else "float",
            },
            "report": self.report.to_json(),
            "numerics": None
            if self.numerics is None
            else [trace.to_json() for trace in self.numerics],
        }
        if not canonical:
            data["timing_ms"] = self.timing_ms
        return data


def dumps(data: dict) -> str:
    """Key-sorted, locale independent JSON text."""
    return json.dumps(data, sort_keys=True, ensure_ascii=False, allow_nan=False)


def render_text(envelope: ReportEnvelope) -> str:
    """Human readable report rendered from `report.txt.j2`."""
    template = _environment.get_template("report.txt.j2")
    return template.render(envelope=envelope.to_json())


def _with_expectation(trace: ResidualTrace, expected: str) -> ResidualTrace:
    agrees = trace.verdict == expected
    if not agrees:
        log.warning(
            "%s trace is %s, the classification predicts %s",
            trace.name,
            trace.verdict,
            expected,
        )
    return replace(trace, extras={**trace.extras, "expected": expected, "agrees": agrees})


def _expected(condition: bool) -> str:
    return TraceVerdict.DECAYING if condition else TraceVerdict.STAGNANT


def verify(
    phi: MobiusMap, report: ClassificationReport, ladder: Sequence[int]
) -> List[ResidualTrace]:
    """Run the finite-section oracle and compare each trace with the verdicts."""
    measures: List[Tuple[str, Callable[[MobiusMap, int], float], str]] = [
        ("cowen", cowen_residual, TraceVerdict.DECAYING),
        (
            "kernel_action",
            lambda f, order: kernel_action_residual(f, KERNEL_POINT, order),
            TraceVerdict.DECAYING,
        ),
        (
            "range_membership",
            range_membership_residual,
            _expected(zero_in_disk(phi) is not None),
        ),
    ]
    if report.posinormal.value:
        measures.append(
            ("posinormal_witness", posinormal_witness_residual, TraceVerdict.DECAYING)
        )
        measures.append(
            (
                "interrupter",
                lambda f, order: interrupter_residual(f, order).residual,
                TraceVerdict.DECAYING,
            )
        )
    if report.coposinormal.value:
        measures.append(
            ("coposinormal_witness", coposinormal_witness_residual, TraceVerdict.DECAYING)
        )

    traces = []
    for name, measure, expected in measures:
        trace = _with_expectation(residual_trace(name, measure, phi, ladder), expected)
        if name == "interrupter":
            top = max(ladder)
            check = interrupter_residual(phi, top)
            trace = replace(
                trace,
                extras={
                    **trace.extras,
                    "min_eigenvalue": check.min_eigenvalue,
                    "positive": check.is_positive(),
                    "lambda_squared_estimate": interrupter_bound_estimate(
                        phi, min(top, LAMBDA_ORDER)
                    ),
                },
            )
        traces.append(trace)
    return traces


def run(spec: MapSpec, options: RunOptions) -> ReportEnvelope:
    """Classify the map of `spec` and optionally verify it numerically.

    Raises:
        ValidationError: The spec parameters are inadmissible.
        NotASelfmap: The map does not send the disk into itself.
        InternalCrossCheckMismatch: The decision routes disagree on exact input.

    Returns:
        The report envelope.
    """
    start = time.perf_counter()
    spec = replace(spec, exact=options.exact)
    phi = spec.to_map()
    report = classify_report(phi)
    numerics = None
    if options.ladder:
        numerics = verify(phi, report, options.ladder)
        if options.csv_dir is not None:
            options.csv_dir.mkdir(parents=True, exist_ok=True)
            for trace in numerics:
                write_trace_csv(trace, options.csv_dir / f"{options.csv_prefix}{trace.name}.csv")
    elapsed = (time.perf_counter() - start) * 1000
    log.debug("Analysed %s in %.1f ms", spec.text, elapsed)
    return ReportEnvelope(spec, report, numerics, round(elapsed, 3))


def error_record(err: PosilabException) -> dict:
    """Structured error payload."""
    return {"code": err.code, "message": str(err)}


@dataclass(frozen=True)
class BatchLine:
    """Outcome of one batch line: an envelope or an inline error."""

    line: int
    envelope: Optional[ReportEnvelope] = None
    error: Optional[dict] = field(default=None)

    def to_json(self, canonical: bool = False) -> dict:
        """The envelope, or `{"line": k, "error": {...}}`."""
        if self.envelope is not None:
            return self.envelope.to_json(canonical)
        return {"line": self.line, "error": self.error}


def _analyze_line(line: int, raw: bytes, options: RunOptions) -> BatchLine:
    try:
        record = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as err:
        return BatchLine(line, error={"code": "parse_error", "message": f"Invalid UTF-8: {err}"})
    except json.JSONDecodeError as err:
        return BatchLine(line, error={"code": "parse_error", "message": str(err)})
    options = replace(options, csv_prefix=f"{options.csv_prefix}line{line}-")
    try:
        return BatchLine(line, envelope=run(spec_from_json(record, options.exact), options))
    except PosilabException as err:
        log.info("Batch line %d failed: %s", line, err)
        return BatchLine(line, error=error_record(err))


def batch(path: Path, options: RunOptions, jobs: int = 1) -> Iterator[BatchLine]:
    """Analyse a JSON-lines file, one record per non-blank line, in input order.

    Args:
        path: The batch file.
        options: Options applied to every line.
        jobs: Number of worker threads.

    Yields:
        One `BatchLine` per non-blank input line.
    """
    # decoded per line so one undecodable record fails alone
    with open(path, "rb") as handle:
        lines = [(number, raw) for number, raw in enumerate(handle, start=1) if raw.strip()]
    log.info("Batch %s with %d records", path, len(lines))
    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        yield from executor.map(lambda item: _analyze_line(*item, options), lines)
