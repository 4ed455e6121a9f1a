"""
描述: 逆高斯间隔时间的计数分布
主要功能:
    - 逆高斯分布函数, exp(2λ/μ)Φ(z₂) 乘积在对数尺度上计算
    - n 重和 (μ -> nμ, λ -> n²λ) 与闭式积分 K_n
    - RP-IG、ERP-IG 概率与计数生存函数
依赖: numpy, scipy.integrate (K_n 校验), services.specfun
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from config.settings import get_settings
from schemas.params import IGRenewalParams
from services.errors import DomainError
from services.renewal_common import (
    as_counts,
    clamp_probabilities,
    stationary_pmf,
    stationary_survival,
    truncation_point,
)
from services.specfun import log_normal_cdf, normal_cdf

logger = logging.getLogger(__name__)


def _result(values: NDArray[np.float64], n: ArrayLike) -> float | NDArray[np.float64]:
    if np.ndim(n) == 0:
        return float(values)
    return values


# ============================================
# region array kernels
# ============================================
def ig_cdf_array(x: ArrayLike, mu: ArrayLike, lam: ArrayLike) -> NDArray[np.float64]:
    """
    F(x; μ, λ) = Φ(z₁) + exp(2λ/μ + ln Φ(z₂)), F(0) = 0, F(∞) = 1
    """

    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    inside = (x > 0) & np.isfinite(x)
    xs = np.where(inside, x, 1.0)
    root = np.sqrt(lam / xs)
    z1 = root * (xs / mu - 1.0)
    z2 = -root * (xs / mu + 1.0)
    values = np.clip(normal_cdf(z1) + np.exp(2.0 * lam / mu + log_normal_cdf(z2)), 0.0, 1.0)
    return np.where(inside, values, np.where(x > 0, 1.0, 0.0))


def ig_integral_array(n: ArrayLike, mu: ArrayLike, lam: ArrayLike, t: ArrayLike) -> NDArray[np.float64]:
    """
    K_n = (t - nμ)Φ(z₁) + (t + nμ) exp(2nλ/μ) Φ(z₂), K_0 = t

    z₁, z₂ 使用 nμ 与 n²λ。
    """

    n = np.asarray(n, dtype=np.int64)
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    positive = n > 0
    k = np.where(positive, n, 1).astype(float)
    mean = k * mu
    shape = k * k * lam
    root = np.sqrt(shape / t)
    z1 = root * (t / mean - 1.0)
    z2 = -root * (t / mean + 1.0)
    values = (t - mean) * normal_cdf(z1) + (t + mean) * np.exp(2.0 * shape / mean + log_normal_cdf(z2))
    return np.where(positive, np.clip(values, 0.0, t), t)


def rp_ig_survival_array(n: ArrayLike, mu: ArrayLike, lam: ArrayLike, t: ArrayLike) -> NDArray[np.float64]:
    n = np.asarray(n, dtype=np.int64)
    k = np.where(n > 0, n, 1).astype(float)
    values = ig_cdf_array(t, k * np.asarray(mu, dtype=float), k * k * np.asarray(lam, dtype=float))
    return np.where(n > 0, values, 1.0)


def rp_ig_pmf_array(n: ArrayLike, mu: ArrayLike, lam: ArrayLike, t: ArrayLike) -> NDArray[np.float64]:
    n = np.asarray(n, dtype=np.int64)
    values = rp_ig_survival_array(n, mu, lam, t) - rp_ig_survival_array(n + 1, mu, lam, t)
    return clamp_probabilities(values, "rp-ig")


def erp_ig_survival_array(n: ArrayLike, mu: ArrayLike, lam: ArrayLike, t: ArrayLike) -> NDArray[np.float64]:
    return stationary_survival(
        lambda k: ig_integral_array(k, mu, lam, t), np.asarray(n, dtype=np.int64), mu
    )


def erp_ig_pmf_array(n: ArrayLike, mu: ArrayLike, lam: ArrayLike, t: ArrayLike) -> NDArray[np.float64]:
    return stationary_pmf(
        lambda k: ig_integral_array(k, mu, lam, t), np.asarray(n, dtype=np.int64), mu, "erp-ig"
    )
# endregion
# ============================================


# ============================================
# region ig_cdf
# ============================================
def ig_cdf(x: ArrayLike, mu: float, lam: float) -> float | NDArray[np.float64]:
    """
    逆高斯分布函数

    参数:
        x: 取值, x >= 0 (x = 0 返回 0)
        mu: 均值
        lam: 形状
    返回:
        F(x; μ, λ)
    """

    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or np.any(arr < 0):
        raise DomainError("ig_cdf requires x >= 0")
    if not (np.isfinite(mu) and mu > 0 and np.isfinite(lam) and lam > 0):
        raise DomainError("ig_cdf requires finite mu > 0 and lambda > 0")
    return _result(ig_cdf_array(arr, mu, lam), x)


def ig_sum_cdf(n: ArrayLike, x: ArrayLike, p: IGRenewalParams) -> float | NDArray[np.float64]:
    """
    n 个独立 IG(μ, λ) 之和的分布函数, 即 IG(nμ, n²λ)

    参数:
        n: 正整数
        x: 取值, x >= 0
        p: 逆高斯参数
    返回:
        F^(n)(x)
    """

    counts = as_counts(n, minimum=1).astype(float)
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or np.any(arr < 0):
        raise DomainError("ig_sum_cdf requires x >= 0")
    values = ig_cdf_array(arr, counts * p.mu, counts * counts * p.lam)
    if np.ndim(n) == 0 and np.ndim(x) == 0:
        return float(values)
    return values
# endregion
# ============================================


# ============================================
# region integral_K
# ============================================
def quadrature_integral_K(n: int, p: IGRenewalParams) -> float:
    """
    数值积分 ∫_0^t F^(n)(u) du (交叉校验用)
    """

    mean, shape = n * p.mu, n * n * p.lam
    value, _ = integrate.quad(
        lambda u: float(ig_cdf_array(u, mean, shape)), 0.0, p.t, epsabs=1e-13, epsrel=1e-11, limit=200
    )
    return float(value)


def integral_K(n: ArrayLike, p: IGRenewalParams, validate: bool = False) -> float | NDArray[np.float64]:
    """
    K_n = ∫_0^t F^(n)(u) du 的闭式值

    参数:
        n: 正整数
        p: 逆高斯参数
        validate: 是否与数值积分交叉校验, 不一致时退回数值积分
    返回:
        [0, t] 内的积分值
    """

    counts = as_counts(n, minimum=1)
    values = np.array(ig_integral_array(counts, p.mu, p.lam, p.t), dtype=float, copy=True)
    if validate:
        tolerance = get_settings().numerics.quadrature_check_tol
        flat = values.reshape(-1)
        for index, k in enumerate(np.asarray(counts).reshape(-1)):
            reference = quadrature_integral_K(int(k), p)
            if abs(reference - flat[index]) > tolerance:
                logger.warning(
                    "K_%s closed form %s disagrees with quadrature %s; using quadrature",
                    k,
                    flat[index],
                    reference,
                )
                flat[index] = reference
        values = flat.reshape(values.shape)
    return _result(values, n)
# endregion
# ============================================


# ============================================
# region rp_ig_pmf / erp_ig_pmf
# ============================================
def rp_ig_pmf(n: ArrayLike, p: IGRenewalParams) -> float | NDArray[np.float64]:
    """
    RP-IG 计数概率 P_n = F^(n)(t) - F^(n+1)(t)
    """

    counts = as_counts(n)
    return _result(rp_ig_pmf_array(counts, p.mu, p.lam, p.t), n)


def rp_ig_count_survival(n: ArrayLike, p: IGRenewalParams) -> float | NDArray[np.float64]:
    counts = as_counts(n, minimum=1)
    return _result(rp_ig_survival_array(counts, p.mu, p.lam, p.t), n)


def erp_ig_pmf(n: ArrayLike, p: IGRenewalParams) -> float | NDArray[np.float64]:
    """
    ERP-IG 计数概率, 以 K_n 代替 I_n

    参数:
        n: 非负整数
        p: 逆高斯参数
    返回:
        Prob(N(t) = n)
    """

    counts = as_counts(n)
    return _result(erp_ig_pmf_array(counts, p.mu, p.lam, p.t), n)


def erp_ig_count_survival(n: ArrayLike, p: IGRenewalParams) -> float | NDArray[np.float64]:
    counts = as_counts(n, minimum=1)
    return _result(erp_ig_survival_array(counts, p.mu, p.lam, p.t), n)


def erp_ig_truncation_point(p: IGRenewalParams) -> int:
    return truncation_point(lambda k: erp_ig_survival_array(k, p.mu, p.lam, p.t), p.t / p.mu)
# endregion
# ============================================
