"""
命令行测试: pmf / moments / simulate / fit 与退出码
"""

from __future__ import annotations

import json

import numpy as np
import pytest
from scipy import stats
from typer.testing import CliRunner

from cli.commands import moments as moments_command
from cli.main import app
from config.settings import APP_VERSION
from services.errors import SeriesNonConvergenceError

runner = CliRunner()


def _run(*args: str):
    return runner.invoke(app, ["--log-level", "ERROR", *args])


def _payload(result) -> dict:
    return json.loads(result.stdout)["payload"]


# pmf
def test_pmf_text_footer():
    result = _run("pmf", "--family", "erp-gamma", "--alpha", "2", "--beta", "0.25")
    assert result.exit_code == 0, result.output
    assert "mean 8.000000" in result.stdout
    assert result.stdout.splitlines()[-1].startswith("pmf ")


def test_pmf_poisson_json():
    result = _run("pmf", "--family", "poisson", "--alpha", "3", "--n-max", "20", "--format", "json")
    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["n_max"] == 20
    pmf = np.array([row["pmf"] for row in payload["rows"]])
    np.testing.assert_allclose(pmf, stats.poisson.pmf(np.arange(21), 3.0), atol=1e-12)
    assert payload["rows"][0]["survival"] == 1.0


def test_pmf_erp_ig_mean():
    result = _run("pmf", "--family", "erp-ig", "--mu", "0.5", "--lambda", "1", "--format", "json")
    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["mean"] == pytest.approx(2.0, abs=1e-6)
    assert payload["total"] == pytest.approx(1.0, abs=1e-8)


def test_pmf_hurdle_and_mixture():
    hurdle = _run(
        "pmf", "--family", "rp-gamma-hurdle", "--alpha", "2.38", "--beta", "0.87",
        "--delta", "0.66", "--hurdle-m", "3", "--format", "json",
    )
    assert hurdle.exit_code == 0, hurdle.output
    assert _payload(hurdle)["total"] == pytest.approx(1.0, abs=1e-8)
    mixture = _run(
        "pmf", "--family", "erp-gamma-beta-mixture", "--alpha", "3.98", "--beta", "1.95",
        "--beta2", "0.93", "--w", "0.85", "--format", "json",
    )
    assert mixture.exit_code == 0, mixture.output
    assert _payload(mixture)["mean"] == pytest.approx(0.85 * 3.98 / 1.95 + 0.15 * 3.98 / 0.93, abs=1e-6)


@pytest.mark.parametrize(
    "args",
    [
        ["--family", "erp-gamma", "--alpha", "-1", "--beta", "1"],
        ["--family", "erp-gamma", "--alpha", "1"],
        ["--family", "erp-gamma-alpha-mixture", "--alpha", "1", "--alpha2", "2", "--beta", "1", "--w", "1.2"],
        ["--family", "rp-gamma-hurdle", "--alpha", "1", "--beta", "1", "--delta", "0.5"],
        ["--family", "poisson", "--alpha", "1", "--format", "xml"],
    ],
)
def test_pmf_invalid_parameters(args):
    result = _run("pmf", *args)
    assert result.exit_code == 1
    assert "Error:" in result.output


# moments
@pytest.mark.parametrize(
    "alpha, beta, verdict",
    [("2", "0.25", "over"), ("32", "4", "under"), ("3", "1", "equi")],
)
def test_moments_dispersion(alpha, beta, verdict):
    result = _run("moments", "--family", "erp-gamma", "--alpha", alpha, "--beta", beta, "--format", "json")
    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["dispersion"] == verdict
    assert payload["variance_source"] == "series"


def test_moments_asymptotic_close_for_long_exposure():
    result = _run("moments", "--family", "erp-gamma", "--alpha", "200", "--beta", "2", "--format", "json")
    payload = _payload(result)
    assert payload["mean"] == pytest.approx(100.0)
    assert abs(payload["variance_asymptotic"] - payload["variance"]) < 0.02


def test_moments_from_table_for_other_families():
    result = _run("moments", "--family", "rp-gamma", "--alpha", "2.86", "--beta", "1.16", "--format", "json")
    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["variance_source"] == "pmf-table"
    assert payload["variance_asymptotic"] is None


def test_moments_numerical_failure_exit_code(monkeypatch):
    def failing(params, n_max=None):
        raise SeriesNonConvergenceError("variance series did not converge", 1.0, 10)

    monkeypatch.setattr(moments_command, "erp_variance_exact", failing)
    result = _run("moments", "--family", "erp-gamma", "--alpha", "2", "--beta", "0.25")
    assert result.exit_code == 3
    assert "did not converge" in result.output


# simulate
def test_simulate_replays_seed():
    args = ["simulate", "--family", "erp-gamma", "--alpha", "2.74", "--beta", "1.15", "--n", "200"]
    first = _run(*args, "--seed", "9")
    second = _run(*args, "--seed", "9")
    third = _run(*args, "--seed", "10")
    assert first.exit_code == 0, first.output
    assert first.stdout == second.stdout
    assert first.stdout != third.stdout
    lines = first.stdout.strip().splitlines()
    assert lines[0] == "count"
    assert len(lines) == 201


def test_simulate_with_covariates_writes_columns():
    result = _run(
        "simulate", "--family", "poisson", "--alpha", "2", "--n", "5", "--seed", "1",
        "--covariates", "2", "--coef", "0.1", "--coef", "-0.2",
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines()[0] == "count,x1,x2"


def test_simulate_coefficient_count_must_match():
    result = _run(
        "simulate", "--family", "poisson", "--alpha", "2", "--n", "5", "--covariates", "2", "--coef", "0.1",
    )
    assert result.exit_code == 1


def test_simulate_then_fit(tmp_path):
    path = tmp_path / "sim.csv"
    simulated = _run(
        "simulate", "--family", "erp-gamma", "--alpha", "2.74", "--beta", "1.15",
        "--n", "3000", "--seed", "5", "--out", str(path), "--format", "json",
    )
    assert simulated.exit_code == 0, simulated.output
    summary = _payload(simulated)
    assert summary["output"] == str(path)
    assert json.loads(simulated.stdout)["seed"] == 5

    fitted = _run("fit", "--family", "erp-gamma", "--data", str(path), "--format", "json")
    assert fitted.exit_code == 0, fitted.output
    natural = {item["name"]: item for item in _payload(fitted)["result"]["natural"]}
    for name, truth in (("alpha", 2.74), ("beta", 1.15)):
        assert abs(natural[name]["estimate"] - truth) <= 4.0 * natural[name]["se"]

    again = _run("fit", "--family", "erp-gamma", "--data", str(path), "--format", "json")
    assert again.stdout == fitted.stdout


# fit
def test_fit_text_report(fertility_csv):
    result = _run(
        "fit", "--family", "poisson", "--data", str(fertility_csv), "--response", "children",
        "--covariates", "age_z,muslim", "--standardize",
    )
    assert result.exit_code == 0, result.output
    assert "coef[muslim]" in result.stdout
    assert "marginal effects" in result.stdout
    assert "standardized covariates" in result.stdout


def test_fit_unknown_covariate(fertility_csv):
    result = _run(
        "fit", "--family", "erp-gamma", "--data", str(fertility_csv), "--response", "children",
        "--covariates", "age_z,income",
    )
    assert result.exit_code == 1
    assert "income" in result.output


def test_fit_missing_file(tmp_path):
    result = _run("fit", "--family", "poisson", "--data", str(tmp_path / "none.csv"))
    assert result.exit_code == 1


def test_fit_not_converged_exit_code(fertility_csv):
    result = _run(
        "fit", "--family", "erp-gamma", "--data", str(fertility_csv), "--response", "children",
        "--max-iter", "1", "--format", "json",
    )
    assert result.exit_code == 2
    assert _payload(result)["result"]["converged"] is False


def test_fit_censored(tmp_path):
    path = tmp_path / "censored.csv"
    path.write_text("count\n" + "\n".join(str(v) for v in [0, 1, 1, 2, 2, 3, 4, 5, 5, 5] * 20) + "\n")
    result = _run("fit", "--family", "poisson", "--data", str(path), "--censor-at", "5", "--format", "json")
    assert result.exit_code == 0, result.output
    assert _payload(result)["result"]["n_observations"] == 200


# 全局
def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert result.stdout.strip() == APP_VERSION


def test_unknown_log_level():
    result = runner.invoke(app, ["--log-level", "LOUD", "pmf", "--family", "poisson", "--alpha", "1"])
    assert result.exit_code == 1


def test_output_format_from_environment(monkeypatch):
    monkeypatch.setenv("RENEWAL_OUTPUT_FORMAT", "json")
    result = _run("pmf", "--family", "poisson", "--alpha", "1", "--n-max", "3")
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["command"] == "pmf"
