"""
描述: 矩命令
主要功能:
    - 均值、精确方差、渐近方差与离散度判定
依赖: typer
"""

from __future__ import annotations

import numpy as np
import typer

from config.settings import APP_VERSION
from schemas.model import Family
from schemas.params import GammaRenewalParams, IGRenewalParams
from schemas.report import MomentsSummary, ReportDocument
from services.moments_service import (
    dispersion_verdict,
    erp_gamma_variance_asymptotic,
    erp_ig_variance_asymptotic,
    erp_mean,
    erp_variance_exact,
    table_moments,
)
from services.validators import family_values

from cli.commands.common import build_family, emit, handle_errors, resolve_format

app = typer.Typer(help="Mean, variance and dispersion of a count distribution", invoke_without_command=True)


# ============================================
# region _summarize
# ============================================
def _summarize(
    family: Family, values: dict[str, float], t: float, hurdle_m: int | None
) -> MomentsSummary:
    if family == Family.ERP_GAMMA:
        params = GammaRenewalParams(alpha=values["alpha"], beta=values["beta"], t=t)
        mean = erp_mean(params)
        variance = erp_variance_exact(params)
        asymptotic: float | None = erp_gamma_variance_asymptotic(params)
        source = "series"
    elif family == Family.ERP_IG:
        params_ig = IGRenewalParams(mu=values["mu"], lam=values["lambda"], t=t)
        mean = erp_mean(params_ig)
        variance = erp_variance_exact(params_ig)
        asymptotic = erp_ig_variance_asymptotic(params_ig)
        source = "series"
    else:
        model = build_family(family, t, hurdle_m)
        rates = model.rates(model.theta_from_natural(values))
        table = np.ravel(model.pmf_table(rates, model.truncation_point(rates)))
        mean, variance = table_moments(table)
        asymptotic = None
        source = "pmf-table"
    return MomentsSummary(
        family=family,
        parameters=values,
        t=t,
        mean=mean,
        variance=variance,
        variance_source=source,
        variance_asymptotic=asymptotic,
        dispersion=dispersion_verdict(mean, variance),
    )
# endregion
# ============================================


# ============================================
# region moments
# ============================================
@app.callback()
def moments(
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
    output_format: str | None = typer.Option(None, "--format", help="text 或 json"),
) -> None:
    """
    ERP 分布族使用方差级数与渐近公式, 其余分布族由概率表计算
    """

    with handle_errors():
        output_format = resolve_format(output_format)
        values = family_values(family, alpha, beta, alpha2, beta2, w, delta, mu, lam)
        build_family(family, t, hurdle_m)
        summary = _summarize(family, values, t, hurdle_m)
        emit(ReportDocument(command="moments", version=APP_VERSION, payload=summary), output_format)
# endregion
# ============================================
