"""
描述: 随机数流与计数抽样
主要功能:
    - 基于计数器 (Philox) 的可复现随机数流
    - 精确伽马抽样 (Marsaglia-Tsang 拒绝法) 与逆高斯抽样 (Michael-Schucany-Haas)
    - RP / ERP / 跨栏 / 泊松计数抽样, 支持逐次抽样参数
依赖: numpy
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from schemas.model import Interarrival
from schemas.params import GammaRenewalParams, IGRenewalParams
from services.errors import DomainError

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


# ============================================
# region RngStream
# ============================================
class RngStream:
    """
    可复现随机数流

    相同种子产生相同的抽样序列; Philox 计数器即流的状态。
    单个流不应在线程间共享。
    """

    def __init__(self, seed: int) -> None:
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise DomainError(f"seed must be an integer, got {seed!r}")
        if not 0 <= int(seed) < SEED_LIMIT:
            raise DomainError("seed must be in [0, 2**64)")
        self.seed = int(seed)
        self._bit_generator = np.random.Philox(self.seed)
        self.generator = np.random.Generator(self._bit_generator)

    @property
    def counter(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._bit_generator.state["state"]["counter"])

    def uniform(self, size: int | tuple[int, ...] | None = None) -> NDArray[np.float64]:
        """
        (0, 1] 上的均匀数 (不含 0, 可安全取对数与幂)
        """
        return 1.0 - self.generator.random(size)

    def normal(self, size: int | tuple[int, ...] | None = None) -> NDArray[np.float64]:
        return self.generator.standard_normal(size)

    def poisson(self, lam: ArrayLike, size: int | tuple[int, ...] | None = None) -> NDArray[np.int64]:
        return self.generator.poisson(lam, size)
# endregion
# ============================================


# ============================================
# region helpers
# ============================================
def _per_draw(value: ArrayLike, size: int) -> NDArray[np.float64]:
    return np.broadcast_to(np.asarray(value, dtype=float), (size,)).copy()


def _check_positive(name: str, value: ArrayLike) -> None:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be finite and > 0")


def _draw_size(size: int | None, *values: ArrayLike) -> int:
    if size is not None:
        if size < 0:
            raise DomainError("size must be >= 0")
        return int(size)
    return int(np.broadcast(*[np.asarray(v) for v in values]).size)
# endregion
# ============================================


# ============================================
# region sample_gamma
# ============================================
def _standard_gamma(shape: NDArray[np.float64], rng: RngStream) -> NDArray[np.float64]:
    boost = shape < 1.0
    # 形状 < 1: 先抽 shape+1 再乘 U^{1/shape}
    a = np.where(boost, shape + 1.0, shape)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(a.size)
    pending = np.arange(a.size)
    while pending.size:
        x = rng.normal(pending.size)
        v = 1.0 + c[pending] * x
        valid = v > 0
        v3 = np.where(valid, v, 1.0) ** 3
        u = rng.uniform(pending.size)
        squeeze = u < 1.0 - 0.0331 * x**4
        full = np.log(u) < 0.5 * x * x + d[pending] * (1.0 - v3 + np.log(v3))
        accept = valid & (squeeze | full)
        out[pending[accept]] = d[pending[accept]] * v3[accept]
        pending = pending[~accept]
    if boost.any():
        out[boost] *= rng.uniform(int(boost.sum())) ** (1.0 / shape[boost])
    return out


def gamma_draws(shape: ArrayLike, rate: ArrayLike, rng: RngStream, size: int) -> NDArray[np.float64]:
    """
    逐次参数的伽马抽样 (参数已校验)
    """

    shape_arr = _per_draw(shape, size)
    rate_arr = _per_draw(rate, size)
    return _standard_gamma(shape_arr, rng) / rate_arr


def sample_gamma(
    shape: ArrayLike, rate: ArrayLike, rng: RngStream, size: int | None = None
) -> float | NDArray[np.float64]:
    """
    伽马 (形状 shape, 速率 rate) 精确抽样

    参数:
        shape: 形状, > 0
        rate: 速率, > 0
        rng: 随机数流
        size: 抽样个数, 默认按参数广播
    返回:
        正实数 (或数组)
    """

    _check_positive("shape", shape)
    _check_positive("rate", rate)
    n = _draw_size(size, shape, rate)
    draws = gamma_draws(shape, rate, rng, n)
    if size is None and np.ndim(shape) == 0 and np.ndim(rate) == 0:
        return float(draws[0])
    return draws
# endregion
# ============================================


# ============================================
# region sample_ig
# ============================================
def ig_draws(mu: ArrayLike, lam: ArrayLike, rng: RngStream, size: int) -> NDArray[np.float64]:
    """
    Michael-Schucany-Haas 变换法, 根 μ[1 + r - √(r(2+r))] 写成不相消的形式
    """

    mu_arr = _per_draw(mu, size)
    lam_arr = _per_draw(lam, size)
    nu = rng.normal(size)
    r = mu_arr * nu * nu / (2.0 * lam_arr)
    x = mu_arr / (1.0 + r + np.sqrt(r * (2.0 + r)))
    u = rng.uniform(size)
    return np.where(u <= mu_arr / (mu_arr + x), x, mu_arr * mu_arr / x)


def sample_ig(
    mu: ArrayLike, lam: ArrayLike, rng: RngStream, size: int | None = None
) -> float | NDArray[np.float64]:
    """
    逆高斯 IG(μ, λ) 精确抽样

    参数:
        mu: 均值, > 0
        lam: 形状, > 0
        rng: 随机数流
        size: 抽样个数
    返回:
        正实数 (或数组)
    """

    _check_positive("mu", mu)
    _check_positive("lambda", lam)
    n = _draw_size(size, mu, lam)
    draws = ig_draws(mu, lam, rng, n)
    if size is None and np.ndim(mu) == 0 and np.ndim(lam) == 0:
        return float(draws[0])
    return draws
# endregion
# ============================================


# ============================================
# region count kernels
# ============================================
def count_renewals(
    first: NDArray[np.float64],
    following: Callable[[NDArray[np.int64], int], NDArray[np.float64]],
    t: NDArray[np.float64],
) -> NDArray[np.int64]:
    """
    统计部分和 X_1 + ... + X_k 不超过 t 的个数

    参数:
        first: 第一个间隔时间
        following: (活跃下标, 序号 k) -> 第 k 个间隔时间
        t: 观测时长 (逐次)
    返回:
        计数
    """

    elapsed = first.copy()
    counts = np.zeros(first.size, dtype=np.int64)
    active = np.nonzero(elapsed <= t)[0]
    k = 1
    while active.size:
        counts[active] += 1
        k += 1
        elapsed[active] += following(active, k)
        active = active[elapsed[active] <= t[active]]
    return counts


def rp_gamma_counts(
    alpha: ArrayLike,
    beta: ArrayLike,
    t: ArrayLike,
    rng: RngStream,
    size: int,
    delta: ArrayLike = 0.0,
    hurdle_m: int | None = None,
) -> NDArray[np.int64]:
    """
    RP-γ 计数 (可选第 m 个间隔形状为 β + δ)
    """

    alpha_arr = _per_draw(alpha, size)
    beta_arr = _per_draw(beta, size)
    delta_arr = _per_draw(delta, size)
    t_arr = _per_draw(t, size)

    def shape_at(index: NDArray[np.int64], k: int) -> NDArray[np.float64]:
        if hurdle_m is not None and k == hurdle_m:
            return beta_arr[index] + delta_arr[index]
        return beta_arr[index]

    first = gamma_draws(shape_at(np.arange(size), 1), alpha_arr, rng, size)
    return count_renewals(
        first,
        lambda index, k: gamma_draws(shape_at(index, k), alpha_arr[index], rng, index.size),
        t_arr,
    )


def erp_gamma_counts(
    alpha: ArrayLike, beta: ArrayLike, t: ArrayLike, rng: RngStream, size: int
) -> NDArray[np.int64]:
    """
    ERP-γ 计数: 首个间隔为 U·Y, Y ~ gamma(β+1, α) (长度偏倚)
    """

    alpha_arr = _per_draw(alpha, size)
    beta_arr = _per_draw(beta, size)
    t_arr = _per_draw(t, size)
    first = rng.uniform(size) * gamma_draws(beta_arr + 1.0, alpha_arr, rng, size)
    return count_renewals(
        first,
        lambda index, k: gamma_draws(beta_arr[index], alpha_arr[index], rng, index.size),
        t_arr,
    )


def rp_ig_counts(
    mu: ArrayLike, lam: ArrayLike, t: ArrayLike, rng: RngStream, size: int
) -> NDArray[np.int64]:
    mu_arr = _per_draw(mu, size)
    lam_arr = _per_draw(lam, size)
    t_arr = _per_draw(t, size)
    first = ig_draws(mu_arr, lam_arr, rng, size)
    return count_renewals(
        first,
        lambda index, k: ig_draws(mu_arr[index], lam_arr[index], rng, index.size),
        t_arr,
    )


def erp_ig_counts(
    mu: ArrayLike, lam: ArrayLike, t: ArrayLike, rng: RngStream, size: int
) -> NDArray[np.int64]:
    """
    ERP-IG 计数: 长度偏倚 Y = μ²/X, 首个间隔为 U·Y
    """

    mu_arr = _per_draw(mu, size)
    lam_arr = _per_draw(lam, size)
    t_arr = _per_draw(t, size)
    biased = mu_arr * mu_arr / ig_draws(mu_arr, lam_arr, rng, size)
    first = rng.uniform(size) * biased
    return count_renewals(
        first,
        lambda index, k: ig_draws(mu_arr[index], lam_arr[index], rng, index.size),
        t_arr,
    )


def poisson_counts(alpha: ArrayLike, t: ArrayLike, rng: RngStream, size: int) -> NDArray[np.int64]:
    return np.asarray(rng.poisson(_per_draw(alpha, size) * _per_draw(t, size)), dtype=np.int64)
# endregion
# ============================================


# ============================================
# region sample_rp_count / sample_erp_count
# ============================================
def _interarrival(family: Interarrival | str) -> Interarrival:
    try:
        return Interarrival(family)
    except ValueError as exc:
        raise DomainError(f"unknown interarrival family: {family!r}") from exc


def _checked(
    family: Interarrival | str, p: GammaRenewalParams | IGRenewalParams
) -> Interarrival:
    kind = _interarrival(family)
    expected = GammaRenewalParams if kind == Interarrival.GAMMA else IGRenewalParams
    if not isinstance(p, expected):
        raise DomainError(f"{kind.value} counts need {expected.__name__}")
    return kind


def sample_rp_count(
    family: Interarrival | str,
    p: GammaRenewalParams | IGRenewalParams,
    rng: RngStream,
    size: int | None = None,
) -> int | NDArray[np.int64]:
    """
    普通更新过程计数: 部分和首次超过 t 所需的间隔个数减一

    参数:
        family: 间隔时间分布 (gamma / ig)
        p: 对应参数
        rng: 随机数流
        size: 抽样个数
    返回:
        非负整数 (或数组)
    """

    kind = _checked(family, p)
    n = 1 if size is None else _draw_size(size)
    if kind == Interarrival.GAMMA:
        counts = rp_gamma_counts(p.alpha, p.beta, p.t, rng, n)
    else:
        counts = rp_ig_counts(p.mu, p.lam, p.t, rng, n)
    return int(counts[0]) if size is None else counts


def sample_erp_count(
    family: Interarrival | str,
    p: GammaRenewalParams | IGRenewalParams,
    rng: RngStream,
    size: int | None = None,
) -> int | NDArray[np.int64]:
    """
    平衡更新过程计数: 首个间隔取长度偏倚变量乘以均匀数, 其后独立同分布

    参数:
        family: 间隔时间分布 (gamma / ig)
        p: 对应参数
        rng: 随机数流
        size: 抽样个数
    返回:
        非负整数 (或数组)
    """

    kind = _checked(family, p)
    n = 1 if size is None else _draw_size(size)
    if kind == Interarrival.GAMMA:
        counts = erp_gamma_counts(p.alpha, p.beta, p.t, rng, n)
    else:
        counts = erp_ig_counts(p.mu, p.lam, p.t, rng, n)
    return int(counts[0]) if size is None else counts


def sample_erp_first_arrival(
    p: GammaRenewalParams, rng: RngStream, size: int
) -> NDArray[np.float64]:
    """
    ERP-γ 首次事件时间 U·Y (用于检验长度偏倚构造)
    """

    return rng.uniform(size) * gamma_draws(p.beta + 1.0, p.alpha, rng, size)
# endregion
# ============================================
