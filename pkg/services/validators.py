"""
描述: 服务层校验工具
主要功能:
    - 列名列表解析 (统一中英文分隔符)
    - 正数校验
    - 命令行参数到分布族自然参数的映射
依赖: 标准库
"""

from __future__ import annotations

import math

from schemas.model import Family
from services.errors import DomainError

# ============================================
# region split_columns
# ============================================
def split_columns(value: str | None) -> list[str]:
    """
    解析逗号分隔的列名, 中文逗号与顿号视同英文逗号

    参数:
        value: 原始字符串
    返回:
        去空白后的列名列表
    """

    if value is None:
        return []
    normalized = value.replace("，", ",").replace("、", ",")
    return [part.strip() for part in normalized.split(",") if part.strip()]
# endregion
# ============================================

# ============================================
# region ensure_positive
# ============================================
def ensure_positive(value: float | None, field_name: str) -> float:
    """
    校验有限正数

    参数:
        value: 数值
        field_name: 字段名
    返回:
        原值
    """

    if value is None:
        raise DomainError(f"{field_name} is required")
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{field_name} must be finite and > 0, got {value}")
    return value
# endregion
# ============================================

# ============================================
# region family_values
# ============================================
def family_values(
    family: Family,
    alpha: float | None = None,
    beta: float | None = None,
    alpha2: float | None = None,
    beta2: float | None = None,
    w: float | None = None,
    delta: float | None = None,
    mu: float | None = None,
    lam: float | None = None,
) -> dict[str, float]:
    """
    命令行参数 -> 自然参数字典

    混合分布族中 --alpha/--beta 为第一分量, --alpha2/--beta2 为第二分量。

    参数:
        family: 分布族
        其余: 对应命令行选项
    返回:
        参数名 -> 数值
    """

    if family == Family.POISSON:
        return {"alpha": ensure_positive(alpha, "--alpha")}
    if family in (Family.RP_GAMMA, Family.ERP_GAMMA):
        return {"alpha": ensure_positive(alpha, "--alpha"), "beta": ensure_positive(beta, "--beta")}
    if family == Family.RP_GAMMA_HURDLE:
        if delta is None or not math.isfinite(delta):
            raise DomainError("--delta is required")
        return {
            "alpha": ensure_positive(alpha, "--alpha"),
            "beta": ensure_positive(beta, "--beta"),
            "delta": delta,
        }
    if family in (Family.ERP_GAMMA_BETA_MIXTURE, Family.ERP_GAMMA_ALPHA_MIXTURE):
        if w is None or not 0 < w < 1:
            raise DomainError("--w must lie in (0, 1)")
        if family == Family.ERP_GAMMA_BETA_MIXTURE:
            return {
                "alpha": ensure_positive(alpha, "--alpha"),
                "beta1": ensure_positive(beta, "--beta"),
                "beta2": ensure_positive(beta2, "--beta2"),
                "w": w,
            }
        return {
            "alpha1": ensure_positive(alpha, "--alpha"),
            "alpha2": ensure_positive(alpha2, "--alpha2"),
            "beta": ensure_positive(beta, "--beta"),
            "w": w,
        }
    return {"mu": ensure_positive(mu, "--mu"), "lambda": ensure_positive(lam, "--lambda")}
# endregion
# ============================================
