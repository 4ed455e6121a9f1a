"""
描述: 伽马间隔时间的更新过程计数分布
主要功能:
    - n 重和的分布函数 F^(n)(u) = γ(αu; nβ)
    - 闭式积分 I_n 与 ERP-γ 概率 / 生存函数
    - RP-γ 概率、第 m 个间隔跨栏的 RP-γ(m) 概率
    - 两分量 ERP-γ 混合
依赖: numpy, services.specfun
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from schemas.params import GammaMixtureSpec, GammaRenewalParams, HurdleSpec
from services.errors import DomainError
from services.renewal_common import (
    as_counts,
    clamp_probabilities,
    heaviside,
    stationary_pmf,
    stationary_survival,
    truncation_point,
)
from services.specfun import log_gamma, reg_lower_inc_gamma

logger = logging.getLogger(__name__)


def _result(values: NDArray[np.float64], n: ArrayLike) -> float | NDArray[np.float64]:
    if np.ndim(n) == 0:
        return float(values)
    return values


# ============================================
# region array kernels
# ============================================
def gamma_integral_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, t: ArrayLike
) -> NDArray[np.float64]:
    """
    I_n = (t - nβ/α) γ(αt; nβ) + α^{-1} (αt)^{nβ} e^{-αt} / Γ(nβ), I_0 = t

    第二项在对数空间计算。
    """

    n = np.asarray(n, dtype=np.int64)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = np.asarray(t, dtype=float)
    positive = n > 0
    shape = np.where(positive, n * beta, 1.0)
    x = alpha * t
    first = (t - shape / alpha) * reg_lower_inc_gamma(shape, x)
    second = np.exp(shape * np.log(x) - x - log_gamma(shape) - np.log(alpha))
    values = np.clip(first + second, 0.0, t)
    return np.where(positive, values, t)


def rp_gamma_survival_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, t: ArrayLike
) -> NDArray[np.float64]:
    """
    RP-γ 计数生存函数 Prob(N >= n) = F^(n)(t), F^(0) = 1
    """

    n = np.asarray(n, dtype=np.int64)
    shape = np.where(n > 0, n * np.asarray(beta, dtype=float), 1.0)
    values = reg_lower_inc_gamma(shape, np.asarray(alpha, dtype=float) * np.asarray(t, dtype=float))
    return np.where(n > 0, values, 1.0)


def rp_gamma_pmf_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, t: ArrayLike
) -> NDArray[np.float64]:
    n = np.asarray(n, dtype=np.int64)
    values = rp_gamma_survival_array(n, alpha, beta, t) - rp_gamma_survival_array(n + 1, alpha, beta, t)
    return clamp_probabilities(values, "rp-gamma")


def erp_gamma_survival_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, t: ArrayLike
) -> NDArray[np.float64]:
    """
    ERP-γ 计数生存函数 G_n = μ^{-1}(I_{n-1} - I_n)
    """

    mu = np.asarray(beta, dtype=float) / np.asarray(alpha, dtype=float)
    return stationary_survival(
        lambda k: gamma_integral_array(k, alpha, beta, t), np.asarray(n, dtype=np.int64), mu
    )


def erp_gamma_pmf_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, t: ArrayLike
) -> NDArray[np.float64]:
    mu = np.asarray(beta, dtype=float) / np.asarray(alpha, dtype=float)
    return stationary_pmf(
        lambda k: gamma_integral_array(k, alpha, beta, t),
        np.asarray(n, dtype=np.int64),
        mu,
        "erp-gamma",
    )


def hurdle_shape_array(
    n: ArrayLike, beta: ArrayLike, delta: ArrayLike, m: int
) -> NDArray[np.float64]:
    """
    前 n 个间隔之和的形状 nβ + θ(n-m)δ
    """

    n = np.asarray(n, dtype=np.int64)
    return n * np.asarray(beta, dtype=float) + heaviside(n - m) * np.asarray(delta, dtype=float)


def hurdle_survival_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, delta: ArrayLike, m: int, t: ArrayLike
) -> NDArray[np.float64]:
    n = np.asarray(n, dtype=np.int64)
    shape = hurdle_shape_array(n, beta, delta, m)
    if np.any((shape <= 0) & (n > 0)):
        raise DomainError("hurdle shape n*beta + delta must stay positive")
    safe_shape = np.where(n > 0, shape, 1.0)
    values = reg_lower_inc_gamma(safe_shape, np.asarray(alpha, dtype=float) * np.asarray(t, dtype=float))
    return np.where(n > 0, values, 1.0)


def hurdle_pmf_array(
    n: ArrayLike, alpha: ArrayLike, beta: ArrayLike, delta: ArrayLike, m: int, t: ArrayLike
) -> NDArray[np.float64]:
    n = np.asarray(n, dtype=np.int64)
    values = hurdle_survival_array(n, alpha, beta, delta, m, t) - hurdle_survival_array(
        n + 1, alpha, beta, delta, m, t
    )
    return clamp_probabilities(values, "rp-gamma-hurdle")
# endregion
# ============================================


# ============================================
# region gamma_sum_cdf
# ============================================
def gamma_sum_cdf(n: ArrayLike, u: ArrayLike, p: GammaRenewalParams) -> float | NDArray[np.float64]:
    """
    n 个独立伽马间隔之和的分布函数 F^(n)(u) = γ(αu; nβ)

    参数:
        n: 正整数
        u: 时间, u >= 0
        p: 伽马参数
    返回:
        F^(n)(u)
    """

    counts = as_counts(n, minimum=1)
    values = reg_lower_inc_gamma(counts * p.beta, p.alpha * np.asarray(u, dtype=float))
    if np.ndim(n) == 0 and np.ndim(u) == 0:
        return float(values)
    return np.asarray(values)
# endregion
# ============================================


# ============================================
# region integral_I
# ============================================
def integral_I(n: ArrayLike, p: GammaRenewalParams) -> float | NDArray[np.float64]:
    """
    I_n = ∫_0^t F^(n)(u) du

    参数:
        n: 正整数
        p: 伽马参数
    返回:
        [0, t] 内的积分值
    """

    counts = as_counts(n, minimum=1)
    return _result(gamma_integral_array(counts, p.alpha, p.beta, p.t), n)
# endregion
# ============================================


# ============================================
# region rp_gamma_pmf
# ============================================
def rp_gamma_pmf(n: ArrayLike, p: GammaRenewalParams) -> float | NDArray[np.float64]:
    """
    普通更新过程的计数概率 P_n = F^(n)(t) - F^(n+1)(t)

    参数:
        n: 非负整数
        p: 伽马参数
    返回:
        Prob(N(t) = n)
    """

    counts = as_counts(n)
    return _result(rp_gamma_pmf_array(counts, p.alpha, p.beta, p.t), n)
# endregion
# ============================================


# ============================================
# region erp_gamma_pmf
# ============================================
def erp_gamma_pmf(n: ArrayLike, p: GammaRenewalParams) -> float | NDArray[np.float64]:
    """
    平衡更新过程的计数概率 Q_n

    参数:
        n: 非负整数
        p: 伽马参数
    返回:
        Prob(N(t) = n)
    """

    counts = as_counts(n)
    return _result(erp_gamma_pmf_array(counts, p.alpha, p.beta, p.t), n)


def erp_gamma_count_survival(n: ArrayLike, p: GammaRenewalParams) -> float | NDArray[np.float64]:
    """
    ERP-γ 计数生存函数 G_n = Prob(N(t) >= n), 用于右删失

    参数:
        n: 正整数
        p: 伽马参数
    返回:
        Prob(N(t) >= n)
    """

    counts = as_counts(n, minimum=1)
    return _result(erp_gamma_survival_array(counts, p.alpha, p.beta, p.t), n)


def erp_gamma_truncation_point(p: GammaRenewalParams) -> int:
    return truncation_point(
        lambda k: erp_gamma_survival_array(k, p.alpha, p.beta, p.t), p.t * p.alpha / p.beta
    )
# endregion
# ============================================


# ============================================
# region rp_gamma_hurdle_pmf
# ============================================
def _check_hurdle(p: GammaRenewalParams, h: HurdleSpec) -> None:
    if h.delta <= -p.beta:
        raise DomainError(f"hurdle delta must exceed -beta ({-p.beta}), got {h.delta}")


def rp_gamma_hurdle_pmf(
    n: ArrayLike, p: GammaRenewalParams, h: HurdleSpec
) -> float | NDArray[np.float64]:
    """
    RP-γ(m): 第 m 个间隔的形状为 β + δ

    P_n = γ(αt; nβ + θ(n-m)δ) - γ(αt; (n+1)β + θ(n+1-m)δ)

    参数:
        n: 非负整数
        p: 伽马参数
        h: 跨栏设定
    返回:
        Prob(N(t) = n)
    """

    _check_hurdle(p, h)
    counts = as_counts(n)
    return _result(hurdle_pmf_array(counts, p.alpha, p.beta, h.delta, h.m, p.t), n)


def rp_gamma_hurdle_count_survival(
    n: ArrayLike, p: GammaRenewalParams, h: HurdleSpec
) -> float | NDArray[np.float64]:
    _check_hurdle(p, h)
    counts = as_counts(n, minimum=1)
    return _result(hurdle_survival_array(counts, p.alpha, p.beta, h.delta, h.m, p.t), n)
# endregion
# ============================================


# ============================================
# region erp_gamma_mixture_pmf
# ============================================
def erp_gamma_mixture_pmf(n: ArrayLike, mix: GammaMixtureSpec) -> float | NDArray[np.float64]:
    """
    两分量 ERP-γ 混合 w Q_n(分量1) + (1-w) Q_n(分量2)

    参数:
        n: 非负整数
        mix: 混合设定
    返回:
        混合概率
    """

    counts = as_counts(n)
    first, second = mix.component1, mix.component2
    values = mix.w * erp_gamma_pmf_array(counts, first.alpha, first.beta, first.t) + (
        1.0 - mix.w
    ) * erp_gamma_pmf_array(counts, second.alpha, second.beta, second.t)
    return _result(values, n)


def erp_gamma_mixture_count_survival(
    n: ArrayLike, mix: GammaMixtureSpec
) -> float | NDArray[np.float64]:
    counts = as_counts(n, minimum=1)
    first, second = mix.component1, mix.component2
    values = mix.w * erp_gamma_survival_array(counts, first.alpha, first.beta, first.t) + (
        1.0 - mix.w
    ) * erp_gamma_survival_array(counts, second.alpha, second.beta, second.t)
    return _result(values, n)
# endregion
# ============================================
