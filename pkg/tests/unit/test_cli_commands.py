"""Unit tests for the ainfdiag Typer CLI commands."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from ainfdiag.cli import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def _isolated_env(clean_env):
    yield


def test_cli_version() -> None:
    result = runner.invoke(app, ["version"])  # prints version and author
    assert result.exit_code == 0
    assert "ainfdiag" in result.output
    assert "Version:" in result.output


def test_cli_delta_k_text() -> None:
    result = runner.invoke(app, ["delta-k", "3"])
    assert result.exit_code == 0
    assert "(1 2 3) ⊗ (1 (2 3))" in result.output
    assert "((1 2) 3) ⊗ (1 2 3)" in result.output
    assert "2 terms in arity 3" in result.output


def test_cli_delta_k_json() -> None:
    result = runner.invoke(app, ["delta-k", "4", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["count"] == 6
    assert len(payload["terms"]) == 6


def test_cli_delta_k_dot() -> None:
    result = runner.invoke(app, ["delta-k", "3", "-f", "dot"])
    assert result.exit_code == 0
    assert "digraph delta_K_3" in result.stdout


def test_cli_delta_k_bad_arity() -> None:
    result = runner.invoke(app, ["delta-k", "1"])
    assert result.exit_code == 2
    assert "ContractViolation" in result.output


def test_cli_delta_k_over_cap() -> None:
    result = runner.invoke(app, ["delta-k", "12"])
    assert result.exit_code == 2
    assert "ResourceLimitError" in result.output


def test_cli_tensor_op() -> None:
    result = runner.invoke(app, ["tensor-op", "--args", "x1,x1,x1,x1"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "y1"


def test_cli_tensor_op_json() -> None:
    result = runner.invoke(
        app, ["tensor-op", "--args", "x1*x2,x1,x1,x1", "--format", "json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["arity"] == 4
    assert payload["value"] == [{"monomial": "x2*y1", "coeff": 1}]


def test_cli_tensor_op_parse_error() -> None:
    result = runner.invoke(app, ["tensor-op", "--args", "x1,q"])
    assert result.exit_code == 2
    assert "MonomialParseError" in result.output


def test_cli_tensor_op_odd_prime_needs_flag() -> None:
    args = ["tensor-op", "--args", "x1,x1,x1", "--n", "3", "--m", "3", "--p", "3"]
    result = runner.invoke(app, args)
    assert result.exit_code == 2
    assert "experimental" in result.output


def test_cli_config_file(config_file: Path) -> None:
    # the saved config sets n = 5
    args = ["--config", str(config_file), "tensor-op", "--args", "x1,x1,x1,x1,x1"]
    result = runner.invoke(app, args)
    assert result.exit_code == 0
    assert result.stdout.strip() == "y1"


def test_cli_bad_config_file(temp_dir: Path) -> None:
    path = temp_dir / "bad.yaml"
    path.write_text("p: 4\n")
    result = runner.invoke(app, ["--config", str(path), "version"])
    assert result.exit_code == 2
    assert "ConfigurationError" in result.output


def test_cli_arity_support() -> None:
    result = runner.invoke(app, ["arity-support", "--max", "6"])
    assert result.exit_code == 0
    assert "Support: {2, 4, 6}" in result.output
    assert "support matches" in result.output


def test_cli_arity_support_rejects_order() -> None:
    result = runner.invoke(app, ["arity-support", "--n", "4", "--m", "5"])
    assert result.exit_code == 2
    assert "ConfigurationError" in result.output


def test_cli_snake() -> None:
    result = runner.invoke(app, ["snake", "--k", "1"])
    assert result.exit_code == 0
    assert "3 4 5" in result.output
    assert "D1{4,5} D2{4,5}" in result.output
    assert "= y1*y2" in result.output


def test_cli_snake_json() -> None:
    result = runner.invoke(
        app, ["snake", "--k", "1", "--mode", "full-diagonal", "--format", "json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["arity"] == 6
    assert payload["moves"] == ["D1{4,5}", "D2{4,5}"]
    assert payload["value"] == [{"monomial": "y1*y2", "coeff": 1}]


def test_cli_snake_bad_spec() -> None:
    result = runner.invoke(app, ["snake", "--k", "0", "--variant", "drop-right"])
    assert result.exit_code == 2


def test_cli_example_c4c4() -> None:
    result = runner.invoke(app, ["example-c4c4", "--skip-m6"])
    assert result.exit_code == 0
    assert "= y1*y2" in result.output
    assert "example verified" in result.output


def test_cli_stasheff() -> None:
    result = runner.invoke(app, ["stasheff", "--max", "4"])
    assert result.exit_code == 0
    assert "St_3" in result.output
    assert "no violations" in result.output


def test_cli_oracle_diff() -> None:
    result = runner.invoke(app, ["oracle-diff", "3"])
    assert result.exit_code == 0
    assert "closure adds 0" in result.output


@pytest.mark.slow
def test_cli_example_c4c4_reports_count() -> None:
    result = runner.invoke(app, ["example-c4c4"])
    assert result.exit_code == 0
    assert "≠ claimed 102" in result.output
    assert "x2, x2, x1*x2, x1*x2, x1, x1" in result.output


def test_cli_arity_support_json() -> None:
    result = runner.invoke(app, ["arity-support", "--max", "6", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["scanned"] == [2, 4, 6]
    assert payload["skipped"] == [3, 5]


def test_cli_missing_config_file(temp_dir: Path) -> None:
    result = runner.invoke(app, ["--config", str(temp_dir / "absent.yaml"), "version"])
    assert result.exit_code == 2
    assert "does not exist" in result.output
