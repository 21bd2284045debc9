"""Map specifications, report envelopes and batch processing."""

from posilab.report.envelope import (
    BatchLine,
    ReportEnvelope,
    RunOptions,
    batch,
    dumps,
    error_record,
    render_text,
    run,
)
from posilab.report.map_spec import MapSpec, parse_complex, parse_map_spec, spec_from_json

__all__ = [
    "BatchLine",
    "MapSpec",
    "ReportEnvelope",
    "RunOptions",
    "batch",
    "dumps",
    "error_record",
    "parse_complex",
    "parse_map_spec",
    "render_text",
    "run",
    "spec_from_json",
]
