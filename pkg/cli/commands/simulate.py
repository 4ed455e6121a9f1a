"""
描述: 模拟命令
主要功能:
    - 按分布族抽样计数, 可选标准正态协变量经连接函数作用
    - 写出数据集 (count, x1..xk)
依赖: typer, numpy
"""

from __future__ import annotations

import sys

import numpy as np
import typer

from config.settings import APP_VERSION, get_settings
from schemas.model import Family
from schemas.report import ReportDocument, SimulationSummary
from services.dataset_service import write_dataset
from services.sampling_service import RngStream
from services.validators import family_values

from cli.commands.common import build_family, emit, handle_errors, resolve_format

app = typer.Typer(help="Simulate a count dataset", invoke_without_command=True)


# ============================================
# region simulate
# ============================================
@app.callback()
def simulate(
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
    n: int = typer.Option(1000, "--n", min=1, help="抽样个数"),
    seed: int | None = typer.Option(None, "--seed", min=0, help="随机种子"),
    covariates: int = typer.Option(0, "--covariates", min=0, help="标准正态协变量列数"),
    coef: list[float] = typer.Option([], "--coef", help="回归系数 (每列一个, 可重复)"),
    out: str | None = typer.Option(None, "--out", help="输出文件, 缺省写到标准输出"),
    output_format: str | None = typer.Option(None, "--format", help="text 或 json"),
) -> None:
    """
    可复现的计数抽样; 给出 --out 时另输出摘要报告
    """

    with handle_errors():
        output_format = resolve_format(output_format)
        seed = get_settings().service.default_seed if seed is None else seed
        values = family_values(family, alpha, beta, alpha2, beta2, w, delta, mu, lam)
        model = build_family(family, t, hurdle_m, covariates)
        theta = model.theta_from_natural(values, list(coef))

        rng = RngStream(seed)
        matrix = rng.normal((n, covariates)) if covariates else None
        rates = model.rates(theta, matrix)
        counts = model.sample(rates, rng, n)

        if out is None:
            write_dataset(sys.stdout, counts, matrix)
            return
        write_dataset(out, counts, matrix)
        summary = SimulationSummary(
            family=family,
            parameters=values,
            coefficients=list(coef),
            t=t,
            n=n,
            empirical_mean=float(np.mean(counts)),
            empirical_variance=float(np.var(counts)),
            output=out,
        )
        emit(ReportDocument(command="simulate", version=APP_VERSION, seed=seed, payload=summary), output_format)
# endregion
# ============================================
