"""
描述: 拟合命令
主要功能:
    - 读取数据集并做最大似然拟合
    - 输出估计、标准误、-loglik、收敛信息与边际效应
依赖: typer
"""

from __future__ import annotations

import typer

from config.settings import APP_VERSION, get_settings
from schemas.fit import FitOptions
from schemas.model import Family, ModelSpec
from schemas.report import FitReport, ReportDocument
from services.dataset_service import load_dataset
from services.estimation_service import fit as fit_model
from services.validators import split_columns

from cli.commands.common import EXIT_NOT_CONVERGED, emit, handle_errors, resolve_format

app = typer.Typer(help="Fit a count model by maximum likelihood", invoke_without_command=True)


# ============================================
# region fit
# ============================================
@app.callback()
def fit(
    family: Family = typer.Option(..., "--family", help="分布族"),
    data: str = typer.Option(..., "--data", help="数据文件 (带表头的分隔文本)"),
    response: str = typer.Option("count", "--response", help="响应列"),
    covariates: str | None = typer.Option(None, "--covariates", help="协变量列, 逗号分隔"),
    hurdle_m: int | None = typer.Option(None, "--hurdle-m", help="跨栏位置 m"),
    censor_at: int | None = typer.Option(None, "--censor-at", help="删失阈值 M"),
    censor_column: str | None = typer.Option(None, "--censor-column", help="0/1 删失标记列"),
    standardize: bool = typer.Option(False, "--standardize", help="标准化协变量"),
    delimiter: str = typer.Option(",", "--delimiter", help="分隔符"),
    t: float = typer.Option(1.0, "--t", help="观测时长"),
    seed: int | None = typer.Option(None, "--seed", min=0, help="多起点扰动的随机种子"),
    max_iter: int | None = typer.Option(None, "--max-iter", min=1, help="最大迭代数"),
    output_format: str | None = typer.Option(None, "--format", help="text 或 json"),
) -> None:
    """
    收敛时退出码 0, 未收敛时仍输出报告并以 2 退出
    """

    with handle_errors():
        output_format = resolve_format(output_format)
        seed = get_settings().service.default_seed if seed is None else seed
        columns = split_columns(covariates)
        design, standardization = load_dataset(
            data,
            response,
            covariates=columns,
            censor_column=censor_column,
            censor_at=censor_at,
            delimiter=delimiter,
            standardize=standardize,
        )
        spec = ModelSpec(family=family, t=t, hurdle_m=hurdle_m, covariates=bool(columns))
        result = fit_model(spec, design, FitOptions(seed=seed, max_iter=max_iter))
        report = FitReport(data=data, response=response, standardization=standardization, result=result)
        emit(ReportDocument(command="fit", version=APP_VERSION, seed=seed, payload=report), output_format)

    if not result.converged:
        raise typer.Exit(EXIT_NOT_CONVERGED)
# endregion
# ============================================
