"""
描述: 更新过程计数分布公共工具
主要功能:
    - 由积分 I_n (或 K_n) 构造平衡更新过程的生存函数与概率
    - 负概率截断与数值失败判定
    - 截断点 N_max 规则
依赖: numpy, config.settings
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from config.settings import get_settings
from services.errors import DomainError, NumericalFailureError

logger = logging.getLogger(__name__)


# ============================================
# region as_counts
# ============================================
def as_counts(n: ArrayLike, minimum: int = 0, name: str = "n") -> NDArray[np.int64]:
    """
    校验并转换计数参数

    参数:
        n: 整数或整数数组
        minimum: 允许的最小值
        name: 参数名 (用于报错)
    返回:
        int64 数组
    """

    arr = np.asarray(n)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise DomainError(f"{name} must be integer-valued")
    elif arr.dtype.kind not in "iu":
        raise DomainError(f"{name} must be integer-valued")
    arr = arr.astype(np.int64)
    if np.any(arr < minimum):
        raise DomainError(f"{name} must be >= {minimum}")
    return arr
# endregion
# ============================================


# ============================================
# region heaviside
# ============================================
def heaviside(n: ArrayLike) -> NDArray[np.float64]:
    """
    离散阶跃函数: n < 0 时为 0, 否则为 1
    """

    return np.where(np.asarray(n) < 0, 0.0, 1.0)
# endregion
# ============================================


# ============================================
# region clamp_probabilities
# ============================================
def clamp_probabilities(values: NDArray[np.float64], context: str) -> NDArray[np.float64]:
    """
    截断抵消误差造成的微小负值

    参数:
        values: 概率值
        context: 分布名 (用于日志与报错)
    返回:
        [0, 1] 内的概率值
    """

    numerics = get_settings().numerics
    lowest = float(np.min(values)) if np.size(values) else 0.0
    if lowest < -numerics.negative_fail_tol:
        raise NumericalFailureError(f"{context}: probability {lowest!r} is negative")
    if lowest < -numerics.clamp_tol:
        logger.debug("%s: clamped negative probability %s", context, lowest)
    return np.clip(values, 0.0, 1.0)
# endregion
# ============================================


# ============================================
# region stationary from integrals
# ============================================
def stationary_survival(
    integral: Callable[[NDArray[np.int64]], NDArray[np.float64]],
    n: NDArray[np.int64],
    mean_interarrival: ArrayLike,
) -> NDArray[np.float64]:
    """
    平衡更新过程 G_n = (I_{n-1} - I_n)/μ, 其中 I_0 = t, G_0 = 1

    参数:
        integral: n -> I_n 的向量化函数 (需支持 n = 0)
        n: 计数
        mean_interarrival: 间隔时间均值 μ
    返回:
        Prob(N(t) >= n)
    """

    n = np.asarray(n, dtype=np.int64)
    previous = integral(np.maximum(n - 1, 0))
    current = integral(n)
    survival = (previous - current) / np.asarray(mean_interarrival, dtype=float)
    survival = np.where(n == 0, 1.0, survival)
    return np.clip(survival, 0.0, 1.0)


def stationary_pmf(
    integral: Callable[[NDArray[np.int64]], NDArray[np.float64]],
    n: NDArray[np.int64],
    mean_interarrival: ArrayLike,
    context: str,
) -> NDArray[np.float64]:
    """
    平衡更新过程 Q_n = μ^{-1}(I_{n-1} - 2 I_n + I_{n+1}), Q_0 = 1 - t/μ + I_1/μ
    """

    n = np.asarray(n, dtype=np.int64)
    mu = np.asarray(mean_interarrival, dtype=float)
    lower = integral(np.maximum(n - 1, 0))
    middle = integral(n)
    upper = integral(n + 1)
    # n = 0: I_{-1} 不存在, 公式退化为 1 - (I_0 - I_1)/μ
    values = np.where(
        n == 0,
        1.0 - (middle - upper) / mu,
        (lower - 2.0 * middle + upper) / mu,
    )
    return clamp_probabilities(values, context)
# endregion
# ============================================


# ============================================
# region truncation_point
# ============================================
def truncation_point(
    survival: Callable[[NDArray[np.int64]], NDArray[np.float64]],
    mean: float,
) -> int:
    """
    N_max: 最小的 n 使 Prob(N >= n) < survival_tol, 上限 max(nmax_floor, nmax_mean_factor * 均值)

    参数:
        survival: n -> Prob(N(t) >= n)
        mean: 计数均值 (或其近似)
    返回:
        截断点
    """

    numerics = get_settings().numerics
    cap = max(numerics.nmax_floor, int(math.ceil(numerics.nmax_mean_factor * mean)))
    start = 1
    chunk = 64
    while start <= cap:
        stop = min(cap, start + chunk - 1)
        ns = np.arange(start, stop + 1, dtype=np.int64)
        below = np.nonzero(survival(ns) < numerics.survival_tol)[0]
        if below.size:
            return int(ns[below[0]])
        start = stop + 1
        chunk *= 2
    return cap
# endregion
# ============================================
