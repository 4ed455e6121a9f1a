"""
描述: CLI 公共工具
主要功能:
    - 错误到退出码的映射
    - 输出格式与报告输出
    - 按命令行选项构造分布族
依赖: typer
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import Iterator

import typer

import services.families  # noqa: F401  注册全部分布族
from config.settings import get_settings
from schemas.model import Family, ModelSpec
from schemas.report import ReportDocument
from services.errors import NumericalFailureError
from services.family_registry import BaseFamily, FamilyRegistry
from services.report_service import render_json, render_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_NUMERICAL = 3


# ============================================
# region handle_errors
# ============================================
@contextmanager
def handle_errors() -> Iterator[None]:
    """
    数值失败 -> 3, 参数 / 数据 / 配置错误 -> 1, 错误信息写到 stderr
    """

    try:
        yield
    except NumericalFailureError as exc:
        logger.debug("numerical failure", exc_info=exc)
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(EXIT_NUMERICAL) from exc
    except (ValueError, RuntimeError) as exc:
        logger.debug("command failed", exc_info=exc)
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(EXIT_USAGE) from exc
# endregion
# ============================================


# ============================================
# region output
# ============================================
def resolve_format(value: str | None) -> str:
    output_format = (value or get_settings().service.output_format).lower()
    if output_format not in ("text", "json"):
        raise ValueError(f"--format must be 'text' or 'json', got {value!r}")
    return output_format


def emit(document: ReportDocument, output_format: str) -> None:
    typer.echo(render_json(document) if output_format == "json" else render_text(document))
# endregion
# ============================================


# ============================================
# region build_family
# ============================================
def build_family(
    family: Family, t: float, hurdle_m: int | None = None, n_covariates: int = 0
) -> BaseFamily:
    """
    构造分布族实例

    参数:
        family: 分布族
        t: 观测时长
        hurdle_m: 跨栏位置
        n_covariates: 协变量个数
    返回:
        分布族实例
    """

    spec = ModelSpec(family=family, t=t, hurdle_m=hurdle_m, covariates=n_covariates > 0)
    return FamilyRegistry.create(spec, n_covariates)
# endregion
# ============================================
