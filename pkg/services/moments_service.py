"""
描述: 计数分布的矩
主要功能:
    - ERP 均值 t/μ 与精确方差级数 (2/μ)Σ I_i + (t/μ)(1 - t/μ)
    - 伽马 / 逆高斯 ERP 的渐近方差
    - 由概率表计算均值方差与离散度判定
依赖: numpy, config.settings
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from config.settings import get_settings
from schemas.params import GammaRenewalParams, IGRenewalParams
from services.errors import DomainError, SeriesNonConvergenceError
from services.renewal_gamma_service import erp_gamma_truncation_point, gamma_integral_array
from services.renewal_ig_service import erp_ig_truncation_point, ig_integral_array

logger = logging.getLogger(__name__)

RenewalParams = GammaRenewalParams | IGRenewalParams

DISPERSION_REL_TOL = 1e-9


# ============================================
# region erp_mean
# ============================================
def erp_mean(p: RenewalParams) -> float:
    """
    平衡更新过程的计数均值 E N(t) = t/μ

    参数:
        p: 伽马或逆高斯参数
    返回:
        均值
    """

    return p.t / p.mean_interarrival
# endregion
# ============================================


# ============================================
# region erp_variance_exact
# ============================================
def _integral_function(p: RenewalParams) -> Callable[[NDArray[np.int64]], NDArray[np.float64]]:
    if isinstance(p, GammaRenewalParams):
        return lambda k: gamma_integral_array(k, p.alpha, p.beta, p.t)
    if isinstance(p, IGRenewalParams):
        return lambda k: ig_integral_array(k, p.mu, p.lam, p.t)
    raise DomainError(f"unsupported parameter type: {type(p).__name__}")


def _default_series_cap(p: RenewalParams) -> int:
    if isinstance(p, GammaRenewalParams):
        n_max = erp_gamma_truncation_point(p)
    else:
        n_max = erp_ig_truncation_point(p)
    return get_settings().numerics.variance_nmax_factor * n_max


def erp_variance_exact(p: RenewalParams, n_max: int | None = None) -> float:
    """
    精确方差 var N(t) = (2/μ) Σ_{i>=1} I_i + (t/μ)(1 - t/μ)

    逆高斯参数以 K_i 代替 I_i。I_i 关于 i 单调递减, 首个相对贡献
    低于 series_rel_tol 的项即停止。

    参数:
        p: 伽马或逆高斯参数
        n_max: 级数项数上限, 默认 variance_nmax_factor * N_max
    返回:
        方差
    """

    if n_max is None:
        n_max = _default_series_cap(p)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")

    tolerance = get_settings().numerics.series_rel_tol
    integral = _integral_function(p)
    total = 0.0
    start, chunk = 1, 64
    converged = False
    while start <= n_max and not converged:
        stop = min(n_max, start + chunk - 1)
        terms = integral(np.arange(start, stop + 1, dtype=np.int64))
        # 部分和阈值比较用累计值, 逐项判断
        running = total + np.cumsum(terms)
        small = np.nonzero(terms < tolerance * running)[0]
        if small.size:
            total = float(running[small[0]])
            converged = True
            terms_used = start + int(small[0])
        else:
            total = float(running[-1])
            terms_used = stop
        start = stop + 1
        chunk *= 2

    if not converged:
        raise SeriesNonConvergenceError("variance series did not converge", total, n_max)

    mu = p.mean_interarrival
    ratio = p.t / mu
    variance = 2.0 * total / mu + ratio * (1.0 - ratio)
    logger.debug("variance series stopped after %s terms", terms_used)
    return float(variance)
# endregion
# ============================================


# ============================================
# region asymptotic variance
# ============================================
def erp_gamma_variance_asymptotic(p: GammaRenewalParams) -> float:
    """
    αt 很大时的方差 αt/β² + 1/6 + 1/(2β²) - 2/(3β²)

    β = 1 时修正项相消, 结果恰为 αt。
    """

    inverse_square = 1.0 / (p.beta * p.beta)
    return p.alpha * p.t * inverse_square + 1.0 / 6.0 + 0.5 * inverse_square - 2.0 / 3.0 * inverse_square


def erp_ig_variance_asymptotic(p: IGRenewalParams) -> float:
    """
    t/μ 很大时的方差 t/λ + 1/6 - (μ/λ)²/2
    """

    ratio = p.mu / p.lam
    return p.t / p.lam + 1.0 / 6.0 - 0.5 * ratio * ratio
# endregion
# ============================================


# ============================================
# region table moments
# ============================================
def table_moments(pmf: NDArray[np.float64]) -> tuple[float, float]:
    """
    由截断概率表计算均值与方差

    参数:
        pmf: P_0..P_N
    返回:
        (均值, 方差)
    """

    values = np.asarray(pmf, dtype=float)
    n = np.arange(values.size, dtype=float)
    mean = float(np.sum(n * values))
    second = float(np.sum(n * n * values))
    return mean, second - mean * mean


def dispersion_verdict(mean: float, variance: float, rel_tol: float = DISPERSION_REL_TOL) -> str:
    """
    离散度判定

    返回:
        "over" / "under" / "equi"
    """

    if variance > mean * (1.0 + rel_tol):
        return "over"
    if variance < mean * (1.0 - rel_tol):
        return "under"
    return "equi"
# endregion
# ============================================
