"""
描述: 报告渲染
主要功能:
    - 结构化文档 (JSON, 键排序, 可逐字节复现)
    - 对齐的纯文本表格
依赖: pydantic (序列化)
"""

from __future__ import annotations

import json

from schemas.fit import FitResult, ParameterEstimate
from schemas.report import (
    FitReport,
    MomentsSummary,
    PmfTable,
    ReportDocument,
    SimulationSummary,
)

FLOAT_FORMAT = "{:.6f}"


def _number(value: float | None) -> str:
    if value is None:
        return "-"
    return FLOAT_FORMAT.format(value)


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows)
    return lines


def _parameters(parameters: dict[str, float]) -> str:
    return ", ".join(f"{key}={value:g}" for key, value in sorted(parameters.items()))


# ============================================
# region render_json
# ============================================
def render_json(document: ReportDocument) -> str:
    """
    渲染为 JSON (键排序, 缩进 2)
    """

    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2)
# endregion
# ============================================


# ============================================
# region render_text
# ============================================
def _pmf_lines(table: PmfTable) -> list[str]:
    lines = [f"family: {table.family.value}  ({_parameters(table.parameters)}, t={table.t:g})"]
    rows = [[str(r.n), _number(r.pmf), _number(r.cdf), _number(r.survival)] for r in table.rows]
    lines.extend(_table(["n", "pmf", "cdf", "survival"], rows))
    lines.append(f"sum {_number(table.total)}  mean {_number(table.mean)}  variance {_number(table.variance)}")
    return lines


def _moments_lines(summary: MomentsSummary) -> list[str]:
    return [
        f"family: {summary.family.value}  ({_parameters(summary.parameters)}, t={summary.t:g})",
        f"mean                  {_number(summary.mean)}",
        f"variance ({summary.variance_source})".ljust(22) + _number(summary.variance),
        "variance (asymptotic) " + _number(summary.variance_asymptotic),
        f"dispersion            {summary.dispersion}",
    ]


def _simulation_lines(summary: SimulationSummary) -> list[str]:
    lines = [
        f"family: {summary.family.value}  ({_parameters(summary.parameters)}, t={summary.t:g})",
        f"draws                {summary.n}",
        f"empirical mean       {_number(summary.empirical_mean)}",
        f"empirical variance   {_number(summary.empirical_variance)}",
    ]
    if summary.coefficients:
        lines.append("coefficients         " + ", ".join(f"{c:g}" for c in summary.coefficients))
    if summary.output:
        lines.append(f"written to           {summary.output}")
    return lines


def _estimate_rows(items: list[ParameterEstimate]) -> list[list[str]]:
    return [[item.name, _number(item.estimate), _number(item.se)] for item in items]


def _fit_lines(report: FitReport) -> list[str]:
    result: FitResult = report.result
    lines = [
        f"family: {result.family.value}  (t={result.t:g}"
        + (f", m={result.hurdle_m}" if result.hurdle_m else "")
        + ")",
        f"data: {report.data}  response: {report.response}  observations: {result.n_observations}",
        "",
    ]
    lines.extend(_table(["parameter", "estimate", "se"], _estimate_rows(result.natural)))
    lines.append("")
    lines.append(f"-loglik      {_number(result.minus_loglik)}")
    lines.append(f"mean         {_number(result.mean_estimate)}")
    lines.append(f"converged    {'yes' if result.converged else 'no'}  (iterations {result.iterations}, starts {result.n_starts})")
    if result.covariance is None:
        lines.append("covariance   unavailable")
    elif result.covariance_pseudo_inverse:
        lines.append("covariance   pseudo-inverse (information matrix singular)")
    if result.loglik_floor_hits:
        lines.append(f"floored      {result.loglik_floor_hits} probabilities")
    if result.marginal_effects is not None:
        effects = result.marginal_effects
        lines.append("")
        lines.append(f"marginal effects at covariate means (E(N|x) = {_number(effects.mean_at)})")
        rows = [[e.name, _number(e.coefficient), _number(e.effect), _number(e.se)] for e in effects.effects]
        lines.extend(_table(["covariate", "coefficient", "effect", "se"], rows))
    if report.standardization is not None:
        lines.append("")
        lines.append("standardized covariates (x - mean) / scale")
        rows = [
            [column, _number(mean), _number(scale)]
            for column, mean, scale in zip(
                report.standardization.columns,
                report.standardization.means,
                report.standardization.scales,
            )
        ]
        lines.extend(_table(["column", "mean", "scale"], rows))
    return lines


def render_text(document: ReportDocument) -> str:
    """
    渲染为纯文本

    参数:
        document: 报告文档
    返回:
        文本 (不含末尾换行)
    """

    payload = document.payload
    if isinstance(payload, PmfTable):
        lines = _pmf_lines(payload)
    elif isinstance(payload, MomentsSummary):
        lines = _moments_lines(payload)
    elif isinstance(payload, SimulationSummary):
        lines = _simulation_lines(payload)
    else:
        lines = _fit_lines(payload)
    footer = f"{document.command} {document.version}"
    if document.seed is not None:
        footer += f"  seed {document.seed}"
    return "\n".join(lines + ["", footer])
# endregion
# ============================================
