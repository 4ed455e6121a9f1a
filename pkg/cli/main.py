"""
描述: CLI 入口
主要功能:
    - 注册 Typer 子命令 (pmf / simulate / fit / moments)
    - 统一日志级别与版本信息
依赖: typer, python-dotenv
"""

from __future__ import annotations

import logging
import sys

from dotenv import load_dotenv

import typer

from cli.commands.fit import app as fit_app
from cli.commands.moments import app as moments_app
from cli.commands.pmf import app as pmf_app
from cli.commands.simulate import app as simulate_app
from config.settings import APP_VERSION, get_settings

load_dotenv(override=True)

app = typer.Typer(help="Renewal-process count models CLI")
app.add_typer(pmf_app, name="pmf")
app.add_typer(simulate_app, name="simulate")
app.add_typer(fit_app, name="fit")
app.add_typer(moments_app, name="moments")


def _print_version(value: bool) -> None:
    if value:
        typer.echo(APP_VERSION)
        raise typer.Exit()


# ============================================
# region main
# ============================================
@app.callback()
def main(
    ctx: typer.Context,
    log_level: str | None = typer.Option(None, "--log-level", help="日志级别, 默认 LOG_LEVEL"),
    version: bool = typer.Option(
        False, "--version", callback=_print_version, is_eager=True, help="显示版本"
    ),
) -> None:
    """
    CLI 全局入口

    参数:
        ctx: Typer 上下文
        log_level: 日志级别
        version: 显示版本后退出
    返回:
        None
    """

    try:
        level_name = (log_level or get_settings().service.log_level).upper()
    except RuntimeError as exc:
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(1) from exc
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        typer.echo(f"Error: unknown log level {level_name!r}", err=True)
        raise typer.Exit(1)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    ctx.obj = {"log_level": level_name}
# endregion
# ============================================


if __name__ == "__main__":
    app()
