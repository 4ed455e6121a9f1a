"""
描述: 概率表命令
主要功能:
    - 输出 n = 0..N 的概率、分布函数与计数生存函数
依赖: typer, numpy
"""

from __future__ import annotations

import numpy as np
import typer

from config.settings import APP_VERSION
from schemas.model import Family
from schemas.report import PmfRow, PmfTable, ReportDocument
from services.moments_service import table_moments
from services.validators import family_values

from cli.commands.common import build_family, emit, handle_errors, resolve_format

app = typer.Typer(help="Tabulate a count distribution", invoke_without_command=True)


# ============================================
# region pmf
# ============================================
@app.callback()
def pmf(
    family: Family = typer.Option(..., "--family", help="分布族"),
    alpha: float | None = typer.Option(None, "--alpha", help="伽马速率 (混合时为第一分量)"),
    beta: float | None = typer.Option(None, "--beta", help="伽马形状 (混合时为第一分量)"),
    alpha2: float | None = typer.Option(None, "--alpha2", help="α 混合的第二分量速率"),
    beta2: float | None = typer.Option(None, "--beta2", help="β 混合的第二分量形状"),
    w: float | None = typer.Option(None, "--w", help="第一分量权重"),
    delta: float | None = typer.Option(None, "--delta", help="跨栏形状偏移"),
    hurdle_m: int | None = typer.Option(None, "--hurdle-m", help="跨栏位置 m"),
    mu: float | None = typer.Option(None, "--mu", help="逆高斯均值"),
    lam: float | None = typer.Option(None, "--lambda", help="逆高斯形状"),
    t: float = typer.Option(1.0, "--t", help="观测时长"),
    n_max: int | None = typer.Option(None, "--n-max", min=0, help="最大计数, 默认按截断规则"),
    output_format: str | None = typer.Option(None, "--format", help="text 或 json"),
) -> None:
    """
    输出概率表, 脚注给出概率和、均值与方差
    """

    with handle_errors():
        output_format = resolve_format(output_format)
        values = family_values(family, alpha, beta, alpha2, beta2, w, delta, mu, lam)
        model = build_family(family, t, hurdle_m)
        rates = model.rates(model.theta_from_natural(values))
        limit = model.truncation_point(rates) if n_max is None else n_max

        ns = np.arange(limit + 1, dtype=np.int64)
        probabilities = np.ravel(model.pmf(ns, rates))
        survival = np.ravel(model.survival(ns, rates))
        cdf = np.cumsum(probabilities)
        mean, variance = table_moments(probabilities)

        table = PmfTable(
            family=family,
            parameters=values,
            t=t,
            n_max=limit,
            rows=[
                PmfRow(n=int(n), pmf=float(p), cdf=float(c), survival=float(s))
                for n, p, c, s in zip(ns, probabilities, cdf, survival)
            ],
            total=float(np.sum(probabilities)),
            mean=mean,
            variance=variance,
        )
        emit(ReportDocument(command="pmf", version=APP_VERSION, payload=table), output_format)
# endregion
# ============================================
