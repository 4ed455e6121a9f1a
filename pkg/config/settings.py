"""
描述: 环境变量配置
主要功能:
    - 读取日志、数值容差与优化器配置
    - 提供集中化配置访问
依赖: 标准库
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache

APP_VERSION = "0.1.0"


@dataclass(frozen=True)
class ServiceSettings:
    """
    运行配置
    """

    log_level: str
    default_seed: int
    output_format: str


@dataclass(frozen=True)
class NumericsSettings:
    """
    数值配置
    """

    survival_tol: float
    nmax_floor: int
    nmax_mean_factor: float
    clamp_tol: float
    negative_fail_tol: float
    loglik_floor: float
    series_rel_tol: float
    variance_nmax_factor: int
    quadrature_check_tol: float


@dataclass(frozen=True)
class OptimizerSettings:
    """
    优化器配置
    """

    xatol: float
    fatol: float
    max_iter: int
    n_starts: int
    hessian_rel_step: float
    hessian_min_step: float
    perturb_scale: float


@dataclass(frozen=True)
class AppSettings:
    """
    全局配置
    """

    service: ServiceSettings
    numerics: NumericsSettings
    optimizer: OptimizerSettings


# ============================================
# region _get_env
# ============================================
def _get_env(key: str, default: str = "") -> str:
    value = os.getenv(key, default)
    return value
# endregion
# ============================================


# ============================================
# region _get_number
# ============================================
def _get_float(key: str, default: str) -> float:
    raw = _get_env(key, default)
    try:
        return float(raw)
    except ValueError as exc:
        raise RuntimeError(f"{key} must be a number, got {raw!r}") from exc


def _get_int(key: str, default: str) -> int:
    raw = _get_env(key, default)
    try:
        return int(raw)
    except ValueError as exc:
        raise RuntimeError(f"{key} must be an integer, got {raw!r}") from exc
# endregion
# ============================================


# ============================================
# region get_settings
# ============================================
@lru_cache(maxsize=1)
def get_settings() -> AppSettings:
    """
    获取应用配置

    返回:
        配置对象
    """

    service = ServiceSettings(
        log_level=_get_env("LOG_LEVEL", "INFO").upper(),
        default_seed=_get_int("RENEWAL_DEFAULT_SEED", "20240101"),
        output_format=_get_env("RENEWAL_OUTPUT_FORMAT", "text").lower(),
    )

    numerics = NumericsSettings(
        survival_tol=_get_float("RENEWAL_SURVIVAL_TOL", "1e-10"),
        nmax_floor=_get_int("RENEWAL_NMAX_FLOOR", "200"),
        nmax_mean_factor=_get_float("RENEWAL_NMAX_MEAN_FACTOR", "20"),
        clamp_tol=_get_float("RENEWAL_CLAMP_TOL", "1e-12"),
        negative_fail_tol=_get_float("RENEWAL_NEGATIVE_FAIL_TOL", "1e-9"),
        loglik_floor=_get_float("RENEWAL_LOGLIK_FLOOR", "1e-300"),
        series_rel_tol=_get_float("RENEWAL_SERIES_REL_TOL", "1e-12"),
        variance_nmax_factor=_get_int("RENEWAL_VARIANCE_NMAX_FACTOR", "10"),
        quadrature_check_tol=_get_float("RENEWAL_QUADRATURE_CHECK_TOL", "1e-6"),
    )

    optimizer = OptimizerSettings(
        xatol=_get_float("RENEWAL_OPT_XATOL", "1e-8"),
        fatol=_get_float("RENEWAL_OPT_FATOL", "1e-10"),
        max_iter=_get_int("RENEWAL_OPT_MAX_ITER", "20000"),
        n_starts=_get_int("RENEWAL_OPT_N_STARTS", "3"),
        hessian_rel_step=_get_float("RENEWAL_HESSIAN_REL_STEP", "1e-5"),
        hessian_min_step=_get_float("RENEWAL_HESSIAN_MIN_STEP", "1e-5"),
        perturb_scale=_get_float("RENEWAL_OPT_PERTURB_SCALE", "0.25"),
    )

    if not isinstance(logging.getLevelName(service.log_level), int):
        raise RuntimeError(f"LOG_LEVEL is not a logging level: {service.log_level}")
    if service.output_format not in ("text", "json"):
        raise RuntimeError("RENEWAL_OUTPUT_FORMAT must be 'text' or 'json'")
    if not 0 <= service.default_seed < 2**64:
        raise RuntimeError("RENEWAL_DEFAULT_SEED must fit in 64 bits")
    if numerics.clamp_tol > numerics.negative_fail_tol:
        raise RuntimeError("RENEWAL_CLAMP_TOL must not exceed RENEWAL_NEGATIVE_FAIL_TOL")
    if optimizer.n_starts < 1:
        raise RuntimeError("RENEWAL_OPT_N_STARTS must be >= 1")

    return AppSettings(service=service, numerics=numerics, optimizer=optimizer)
# endregion
# ============================================
