"""
描述: 特殊函数
主要功能:
    - 对数伽马函数 (Lanczos 近似)
    - 正则化下不完全伽马函数 (x < a+1 用级数, 否则用连分式)
    - 标准正态分布函数及其对数 (经由 Q(1/2, z^2/2), 深尾不下溢)
依赖: numpy

全部函数接受标量或数组, 标量输入返回 float。
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from services.errors import DomainError, NumericalFailureError

# Lanczos g=7, n=9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_HALF = math.log(0.5)
_EPS = float(np.finfo(float).eps)
_FPMIN = 1e-300
_MAX_ITER = 100_000


# ============================================
# region helpers
# ============================================
def _as_array(value: ArrayLike, name: str) -> NDArray[np.float64]:
    arr = np.asarray(value, dtype=float)
    if np.isnan(arr).any():
        raise DomainError(f"{name} must not be NaN")
    return arr


def _result(out: NDArray[np.float64], scalar: bool) -> float | NDArray[np.float64]:
    if scalar:
        return float(out)
    return out
# endregion
# ============================================


# ============================================
# region log_gamma
# ============================================
def _log_gamma_unchecked(x: NDArray[np.float64]) -> NDArray[np.float64]:
    small = x < 0.5
    # Γ(x) = Γ(x+1)/x keeps the Lanczos sum away from its poles
    z = np.where(small, x + 1.0, x) - 1.0
    acc = np.full_like(z, _LANCZOS_COEFFS[0])
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc = acc + _LANCZOS_COEFFS[k] / (z + k)
    tt = z + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (z + 0.5) * np.log(tt) - tt + np.log(acc)
    return np.where(small, out - np.log(x), out)


def log_gamma(x: ArrayLike) -> float | NDArray[np.float64]:
    """
    计算 ln Γ(x)

    参数:
        x: 正实数 (标量或数组)
    返回:
        ln Γ(x)
    """

    arr = _as_array(x, "x")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("log_gamma requires finite x > 0")
    return _result(_log_gamma_unchecked(arr), np.ndim(x) == 0)
# endregion
# ============================================


# ============================================
# region incomplete gamma kernels
# ============================================
def _log_lower_series(a: NDArray[np.float64], x: NDArray[np.float64]) -> NDArray[np.float64]:
    ap = a.copy()
    term = np.ones_like(a)
    total = np.ones_like(a)
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if np.all(term <= total * _EPS):
            break
    else:
        raise NumericalFailureError("incomplete gamma series did not converge")
    return np.log(total) - x + a * np.log(x) - _log_gamma_unchecked(a + 1.0)


def _log_upper_fraction(a: NDArray[np.float64], x: NDArray[np.float64]) -> NDArray[np.float64]:
    # modified Lentz
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= 2.0 * _EPS):
            break
    else:
        raise NumericalFailureError("incomplete gamma continued fraction did not converge")
    return np.log(h) - x + a * np.log(x) - _log_gamma_unchecked(a)


def _broadcast_flat(
    a: NDArray[np.float64], x: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64], tuple[int, ...]]:
    a_b, x_b = np.broadcast_arrays(a, x)
    return a_b.ravel().copy(), x_b.ravel().copy(), a_b.shape


def _lower_unchecked(a: NDArray[np.float64], x: NDArray[np.float64]) -> NDArray[np.float64]:
    a_f, x_f, shape = _broadcast_flat(a, x)
    out = np.zeros(a_f.size)
    infinite = np.isinf(x_f)
    out[infinite] = 1.0
    series = (x_f > 0) & (x_f < a_f + 1.0)
    fraction = (x_f >= a_f + 1.0) & ~infinite
    if series.any():
        out[series] = np.exp(_log_lower_series(a_f[series], x_f[series]))
    if fraction.any():
        out[fraction] = -np.expm1(_log_upper_fraction(a_f[fraction], x_f[fraction]))
    return out.reshape(shape)


def _log_upper_unchecked(a: NDArray[np.float64], x: NDArray[np.float64]) -> NDArray[np.float64]:
    a_f, x_f, shape = _broadcast_flat(a, x)
    out = np.zeros(a_f.size)
    infinite = np.isinf(x_f)
    out[infinite] = -np.inf
    series = (x_f > 0) & (x_f < a_f + 1.0)
    fraction = (x_f >= a_f + 1.0) & ~infinite
    if series.any():
        out[series] = np.log1p(-np.exp(_log_lower_series(a_f[series], x_f[series])))
    if fraction.any():
        out[fraction] = _log_upper_fraction(a_f[fraction], x_f[fraction])
    return out.reshape(shape)
# endregion
# ============================================


# ============================================
# region reg_lower_inc_gamma
# ============================================
def reg_lower_inc_gamma(a: ArrayLike, x: ArrayLike) -> float | NDArray[np.float64]:
    """
    正则化下不完全伽马函数 γ(x; a) = ∫_0^x u^{a-1} e^{-u} du / Γ(a)

    参数:
        a: 形状参数, a > 0
        x: 积分上限, x >= 0
    返回:
        [0, 1] 内的函数值
    """

    a_arr = _as_array(a, "a")
    x_arr = _as_array(x, "x")
    if not np.all(np.isfinite(a_arr)) or np.any(a_arr <= 0):
        raise DomainError("reg_lower_inc_gamma requires finite a > 0")
    if np.any(x_arr < 0):
        raise DomainError("reg_lower_inc_gamma requires x >= 0")
    out = _lower_unchecked(a_arr, x_arr)
    return _result(out, np.ndim(a) == 0 and np.ndim(x) == 0)


def log_reg_upper_inc_gamma(a: ArrayLike, x: ArrayLike) -> float | NDArray[np.float64]:
    """
    正则化上不完全伽马函数的对数 ln Q(a, x), 深尾不下溢
    """

    a_arr = _as_array(a, "a")
    x_arr = _as_array(x, "x")
    if not np.all(np.isfinite(a_arr)) or np.any(a_arr <= 0):
        raise DomainError("log_reg_upper_inc_gamma requires finite a > 0")
    if np.any(x_arr < 0):
        raise DomainError("log_reg_upper_inc_gamma requires x >= 0")
    out = _log_upper_unchecked(a_arr, x_arr)
    return _result(out, np.ndim(a) == 0 and np.ndim(x) == 0)
# endregion
# ============================================


# ============================================
# region normal_cdf
# ============================================
def _log_normal_tail(z: NDArray[np.float64]) -> NDArray[np.float64]:
    # ln erfc(|z|/√2) = ln Q(1/2, z²/2)
    half_square = 0.5 * z * z
    return _log_upper_unchecked(np.full_like(half_square, 0.5), half_square)


def normal_cdf(z: ArrayLike) -> float | NDArray[np.float64]:
    """
    标准正态分布函数 Φ(z)

    参数:
        z: 实数 (标量或数组)
    返回:
        Φ(z)
    """

    arr = _as_array(z, "z")
    tail = 0.5 * np.exp(_log_normal_tail(arr))
    out = np.where(arr < 0, tail, 1.0 - tail)
    return _result(out, np.ndim(z) == 0)


def log_normal_cdf(z: ArrayLike) -> float | NDArray[np.float64]:
    """
    ln Φ(z), 对 z 远小于 0 (直到 -1e4 以下) 仍保持有限精度

    参数:
        z: 实数 (标量或数组)
    返回:
        ln Φ(z)
    """

    arr = _as_array(z, "z")
    log_tail = _log_normal_tail(arr)
    out = np.where(arr < 0, _LOG_HALF + log_tail, np.log1p(-0.5 * np.exp(log_tail)))
    return _result(out, np.ndim(z) == 0)
# endregion
# ============================================
