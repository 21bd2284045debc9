"""Tests for the posilab command line interface."""

import json
from unittest.mock import patch

import pytest
from click.testing import CliRunner
from pytest import fixture

from posilab import __version__
from posilab.cli import cli
from posilab.mobius import make_map

DILATION_SPEC = "coeffs:a=1,b=0,c=-1,d=2"


@fixture
def runner() -> CliRunner:
    """Runner keeping stdout and stderr apart."""
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        # newer click versions always separate the streams
        return CliRunner()


@fixture(autouse=True)
def setup_logger_mock():
    """Keep the root logger away from the runner's temporary streams."""
    with patch("posilab.cli.setup_logger") as mock:
        yield mock


def error_of(result) -> dict:
    """Structured error printed on stderr."""
    return json.loads(result.stderr.strip().splitlines()[-1])["error"]


def test_version(runner):
    """Test for posilab version."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_analyze(runner):
    """Test that a selfmap is classified and printed as JSON."""
    result = runner.invoke(cli, ["analyze", "parabolic:t=1/2"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["input"] == {"spec": "parabolic:t=1/2", "backend": "exact"}
    assert data["report"]["posinormal"]["value"] is True
    assert data["report"]["map_class"]["kind"] == "ParabolicNonAutomorphism"
    assert "timing_ms" in data
    assert data["numerics"] is None


def test_analyze_canonical_is_stable(runner):
    """Test that canonical output is identical across runs."""
    first = runner.invoke(cli, ["analyze", DILATION_SPEC, "--canonical"])
    second = runner.invoke(cli, ["analyze", DILATION_SPEC, "--canonical"])
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout
    assert "timing_ms" not in json.loads(first.stdout)


def test_analyze_text(runner):
    """Test the human readable report."""
    result = runner.invoke(cli, ["analyze", DILATION_SPEC, "--format", "text"])
    assert result.exit_code == 0
    assert "Map        coeffs:a=1,b=0,c=-1,d=2 (exact)" in result.stdout
    assert "posinormal   yes" in result.stdout


def test_analyze_float(runner):
    """Test that --float switches the backend."""
    result = runner.invoke(cli, ["analyze", "parabolic:t=1/2", "--float"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["input"]["backend"] == "float"


def test_analyze_backend_from_environment(runner):
    """Test that POSILAB_BACKEND is the default backend."""
    result = runner.invoke(cli, ["analyze", "parabolic:t=1/2"], env={"POSILAB_BACKEND": "float"})
    assert result.exit_code == 0
    assert json.loads(result.stdout)["input"]["backend"] == "float"


def test_analyze_verify_default_ladder(runner):
    """Test that a bare --verify uses the default ladder."""
    result = runner.invoke(cli, ["analyze", DILATION_SPEC, "--verify", "--canonical"])
    assert result.exit_code == 0
    numerics = json.loads(result.stdout)["numerics"]
    assert [trace["name"] for trace in numerics][:3] == [
        "cowen",
        "kernel_action",
        "range_membership",
    ]
    assert [order for order, _ in numerics[0]["points"]] == [16, 32, 64, 128]


def test_analyze_verify_ladder(runner, tmp_path):
    """Test an explicit ladder and the CSV dump."""
    out = tmp_path / "csv"
    result = runner.invoke(
        cli, ["analyze", DILATION_SPEC, "--verify=32,16", "--csv-dir", str(out)]
    )
    assert result.exit_code == 0
    numerics = json.loads(result.stdout)["numerics"]
    assert [order for order, _ in numerics[0]["points"]] == [16, 32]
    assert (out / "cowen.csv").exists()


@pytest.mark.parametrize("ladder", ["1", "16,1024", "a,b"])
def test_analyze_verify_bad_ladder(runner, ladder):
    """Test that invalid ladders are usage errors."""
    result = runner.invoke(cli, ["analyze", DILATION_SPEC, f"--verify={ladder}"])
    assert result.exit_code == 1
    assert error_of(result)["code"] == "usage_error"


def test_analyze_not_a_selfmap(runner):
    """Test that maps leaving the disk exit with code 2."""
    result = runner.invoke(cli, ["analyze", "coeffs:a=2,b=0,c=0,d=1"])
    assert result.exit_code == 2
    assert result.stdout == ""
    assert error_of(result)["code"] == "not_a_selfmap"


@pytest.mark.parametrize(
    "spec,code",
    [
        ("spiral:t=1", "parse_error"),
        ("parabolic:t=x", "parse_error"),
        ("parabolic:t=-1", "validation_error"),
    ],
)
def test_analyze_bad_spec(runner, spec, code):
    """Test that parse and validation errors exit with code 1."""
    result = runner.invoke(cli, ["analyze", spec])
    assert result.exit_code == 1
    assert error_of(result)["code"] == code


def test_analyze_float_overflow(runner):
    """Test that coefficients beyond the float range are a validation error."""
    spec = "coeffs:a=1e400,b=0,c=0,d=1e401"
    result = runner.invoke(cli, ["analyze", spec, "--float"])
    assert result.exit_code == 1
    assert error_of(result)["code"] == "validation_error"
    assert runner.invoke(cli, ["analyze", spec]).exit_code == 0


def test_analyze_mismatch(runner):
    """Test that disagreeing decision routes exit with code 3."""
    with patch("posilab.classifier.phi_sigma_inv", return_value=make_map(2, 0, 0, 1)):
        result = runner.invoke(cli, ["analyze", DILATION_SPEC])
    assert result.exit_code == 3
    assert error_of(result)["code"] == "internal_cross_check_mismatch"


@pytest.mark.parametrize("args", [["analyze"], ["analyze", DILATION_SPEC, "--bogus"], ["spin"]])
def test_usage_errors(runner, args):
    """Test that click usage errors exit with code 1 and a JSON error."""
    result = runner.invoke(cli, args)
    assert result.exit_code == 1
    assert error_of(result)["code"] == "usage_error"


def test_verbose_and_dev(runner, setup_logger_mock):
    """Test that the group options reach logger and configuration."""
    result = runner.invoke(cli, ["--dev", "--eps", "1e-8", "-v", "config"])
    assert result.exit_code == 0
    setup_logger_mock.assert_called_once_with(True)
    assert "Development mode: active" in result.stdout
    assert "Eps: 1e-08" in result.stdout


def test_config(runner):
    """Test that the config command prints the defaults."""
    result = runner.invoke(cli, ["config"])
    assert result.exit_code == 0
    assert f"Posilab v. {__version__}" in result.stdout
    assert "Backend: exact" in result.stdout


@fixture
def batch_file(tmp_path):
    """Batch with identity, φ_1 and 2z."""
    path = tmp_path / "maps.jsonl"
    path.write_text(
        '"coeffs:a=1,b=0,c=0,d=1"\n"parabolic:t=1"\n\n"coeffs:a=2,b=0,c=0,d=1"\n',
        encoding="utf-8",
    )
    return path


def test_batch(runner, batch_file):
    """Test that batch failures are reported inline with exit code 0."""
    result = runner.invoke(cli, ["batch", str(batch_file), "--canonical", "-j", "2"])
    assert result.exit_code == 0
    lines = [json.loads(line) for line in result.stdout.splitlines()]
    assert len(lines) == 3
    assert lines[0]["input"]["spec"] == "coeffs:a=1,b=0,c=0,d=1"
    assert lines[1]["input"]["spec"] == "parabolic:t=1"
    assert lines[2] == {
        "line": 4,
        "error": {"code": "not_a_selfmap", "message": lines[2]["error"]["message"]},
    }


def test_batch_text(runner, batch_file):
    """Test the text rendering of a batch."""
    result = runner.invoke(cli, ["batch", str(batch_file), "--format", "text"])
    assert result.exit_code == 0
    assert result.stdout.count("Map        ") == 2
    assert "Line 4:" in result.stdout


def test_batch_mismatch(runner, batch_file):
    """Test that a mismatch on any line exits with code 3."""
    with patch("posilab.classifier.phi_sigma_inv", return_value=make_map(2, 0, 0, 1)):
        result = runner.invoke(cli, ["batch", str(batch_file)])
    assert result.exit_code == 3
    codes = [json.loads(line).get("error", {}).get("code") for line in result.stdout.splitlines()]
    assert "internal_cross_check_mismatch" in codes


def test_batch_missing_file(runner, tmp_path):
    """Test that a missing batch file is a usage error."""
    result = runner.invoke(cli, ["batch", str(tmp_path / "missing.jsonl")])
    assert result.exit_code == 1
    assert error_of(result)["code"] == "usage_error"
