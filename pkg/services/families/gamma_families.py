"""
描述: 伽马间隔时间的计数分布族
主要功能:
    - RP-γ、ERP-γ、跨栏 RP-γ(m)
    - ERP-γ 两分量混合 (共享 α 的 β 混合, 共享 β 的 α 混合)
依赖: numpy, services.renewal_gamma_service, services.family_registry
"""

from __future__ import annotations

import math
from typing import ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from schemas.model import Family
from services.errors import DomainError
from services.family_registry import BaseFamily, Rates, expit, logit, register_family
from services.renewal_gamma_service import (
    erp_gamma_pmf_array,
    erp_gamma_survival_array,
    hurdle_pmf_array,
    hurdle_survival_array,
    rp_gamma_pmf_array,
    rp_gamma_survival_array,
)
from services.sampling_service import RngStream, erp_gamma_counts, rp_gamma_counts

SHAPE_START_RANGE = (0.05, 20.0)


def _shape_start(dispersion: float) -> float:
    # var/mean ≈ 1/β
    low, high = SHAPE_START_RANGE
    return float(np.clip(1.0 / max(dispersion, 1e-12), low, high))


def _require(values: dict[str, float], *keys: str) -> list[float]:
    missing = [key for key in keys if key not in values]
    if missing:
        raise DomainError(f"missing parameters: {', '.join(missing)}")
    picked = [float(values[key]) for key in keys]
    return picked


def _log_positive(name: str, value: float) -> float:
    if not value > 0:
        raise DomainError(f"{name} must be > 0, got {value}")
    return math.log(value)


# ============================================
# region RP-γ
# ============================================
@register_family
class RPGammaFamily(BaseFamily):
    """
    普通更新过程, α_i = α exp(𝛃ᵀx_i)
    """

    name: ClassVar[Family] = Family.RP_GAMMA
    log_linear_mean: ClassVar[bool] = False

    def base_names(self) -> list[str]:
        return ["log_alpha", "log_beta"]

    def natural_names(self) -> list[str]:
        return ["alpha", "beta"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        return {"alpha": np.exp(base[0] + np.asarray(eta, dtype=float)), "beta": np.exp(base[1:2])}

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return rp_gamma_pmf_array(n, rates["alpha"], rates["beta"], self.t)

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return rp_gamma_survival_array(n, rates["alpha"], rates["beta"], self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return self.survival_sum_mean(rates, self.t * rates["alpha"] / rates["beta"])

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        return [math.exp(base[0]), math.exp(base[1])]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        alpha, beta = _require(values, "alpha", "beta")
        return np.array([_log_positive("alpha", alpha), _log_positive("beta", beta)])

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        beta = _shape_start(dispersion)
        return np.array([math.log(beta * mean / self.t), math.log(beta)])

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return rp_gamma_counts(rates["alpha"], rates["beta"], self.t, rng, size)
# endregion
# ============================================


# ============================================
# region ERP-γ
# ============================================
@register_family
class ERPGammaFamily(BaseFamily):
    """
    平衡更新过程

    无协变量: θ = (log α, log β)。
    有协变量: θ = (log η₀, log β, 𝛃), α_i = (β/t) η₀ exp(𝛃ᵀx_i),
    报告的 α = β η₀ / t 为 x = 0 处的基线。
    """

    name: ClassVar[Family] = Family.ERP_GAMMA

    def base_names(self) -> list[str]:
        return ["log_eta0", "log_beta"] if self.n_covariates else ["log_alpha", "log_beta"]

    def natural_names(self) -> list[str]:
        return ["alpha", "beta", "eta0"] if self.n_covariates else ["alpha", "beta"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        beta = np.exp(base[1:2])
        scale = np.exp(base[0] + np.asarray(eta, dtype=float))
        alpha = beta / self.t * scale if self.n_covariates else scale
        return {"alpha": alpha, "beta": beta}

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return erp_gamma_pmf_array(n, rates["alpha"], rates["beta"], self.t)

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return erp_gamma_survival_array(n, rates["alpha"], rates["beta"], self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return self.t * rates["alpha"] / rates["beta"]

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        beta = math.exp(base[1])
        if self.n_covariates:
            eta0 = math.exp(base[0])
            return [beta * eta0 / self.t, beta, eta0]
        return [math.exp(base[0]), beta]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        (beta,) = _require(values, "beta")
        log_beta = _log_positive("beta", beta)
        if self.n_covariates and "eta0" in values:
            return np.array([_log_positive("eta0", values["eta0"]), log_beta])
        (alpha,) = _require(values, "alpha")
        if self.n_covariates:
            return np.array([_log_positive("alpha", alpha) + math.log(self.t / beta), log_beta])
        return np.array([_log_positive("alpha", alpha), log_beta])

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        beta = _shape_start(dispersion)
        if self.n_covariates:
            return np.array([math.log(mean), math.log(beta)])
        return np.array([math.log(beta * mean / self.t), math.log(beta)])

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return erp_gamma_counts(rates["alpha"], rates["beta"], self.t, rng, size)
# endregion
# ============================================


# ============================================
# region RP-γ(m)
# ============================================
@register_family
class RPGammaHurdleFamily(BaseFamily):
    """
    第 m 个间隔时间形状为 β + δ 的 RP-γ

    δ = exp(s) - β 保证 δ > -β; δ = 0 即 RP-γ。
    """

    name: ClassVar[Family] = Family.RP_GAMMA_HURDLE
    log_linear_mean: ClassVar[bool] = False

    @property
    def m(self) -> int:
        if self.hurdle_m is None:
            raise DomainError("rp-gamma-hurdle requires hurdle_m")
        return self.hurdle_m

    def base_names(self) -> list[str]:
        return ["log_alpha", "log_beta", "log_beta_plus_delta"]

    def natural_names(self) -> list[str]:
        return ["alpha", "beta", "delta"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        beta = np.exp(base[1:2])
        return {
            "alpha": np.exp(base[0] + np.asarray(eta, dtype=float)),
            "beta": beta,
            "delta": np.exp(base[2:3]) - beta,
        }

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return hurdle_pmf_array(n, rates["alpha"], rates["beta"], rates["delta"], self.m, self.t)

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return hurdle_survival_array(n, rates["alpha"], rates["beta"], rates["delta"], self.m, self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return self.survival_sum_mean(rates, self.t * rates["alpha"] / rates["beta"])

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        beta = math.exp(base[1])
        return [math.exp(base[0]), beta, math.exp(base[2]) - beta]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        alpha, beta, delta = _require(values, "alpha", "beta", "delta")
        if delta <= -beta:
            raise DomainError(f"hurdle delta must exceed -beta ({-beta}), got {delta}")
        return np.array(
            [_log_positive("alpha", alpha), _log_positive("beta", beta), math.log(beta + delta)]
        )

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        beta = _shape_start(dispersion)
        return np.array([math.log(beta * mean / self.t), math.log(beta), math.log(beta)])

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return rp_gamma_counts(
            rates["alpha"], rates["beta"], self.t, rng, size, delta=rates["delta"], hurdle_m=self.m
        )
# endregion
# ============================================


# ============================================
# region ERP-γ mixtures
# ============================================
class _ERPGammaMixture(BaseFamily):
    """
    w ERP-γ(α₁, β₁) + (1 - w) ERP-γ(α₂, β₂), 两分量的 α 同乘 exp(𝛃ᵀx)
    """

    multi_start: ClassVar[bool] = True
    # 两分量在 base 中的位置 (可交换的一对), logit w 固定在 base[3]
    swap_pairs: ClassVar[tuple[tuple[int, int], ...]] = ()

    def canonical_base(self, base: NDArray[np.float64]) -> NDArray[np.float64]:
        """
        交换分量标签使 w >= 0.5
        """

        base = np.array(base, dtype=float)
        if base[3] >= 0.0:
            return base
        for i, j in self.swap_pairs:
            base[i], base[j] = base[j], base[i]
        base[3] = -base[3]
        return base

    @staticmethod
    def _components(rates: Rates) -> tuple[NDArray[np.float64], ...]:
        return rates["alpha1"], rates["beta1"], rates["alpha2"], rates["beta2"], rates["w"]

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        a1, b1, a2, b2, w = self._components(rates)
        return w * erp_gamma_pmf_array(n, a1, b1, self.t) + (1.0 - w) * erp_gamma_pmf_array(
            n, a2, b2, self.t
        )

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        a1, b1, a2, b2, w = self._components(rates)
        return w * erp_gamma_survival_array(n, a1, b1, self.t) + (
            1.0 - w
        ) * erp_gamma_survival_array(n, a2, b2, self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        a1, b1, a2, b2, w = self._components(rates)
        return self.t * (w * a1 / b1 + (1.0 - w) * a2 / b2)

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        a1, b1, a2, b2, w = self._components(rates)
        first = rng.uniform(size) <= w
        alpha = np.where(first, a1, a2)
        beta = np.where(first, b1, b2)
        return erp_gamma_counts(alpha, beta, self.t, rng, size)


@register_family
class ERPGammaBetaMixtureFamily(_ERPGammaMixture):
    """
    共享速率 α, 形状 β₁ / β₂
    """

    name: ClassVar[Family] = Family.ERP_GAMMA_BETA_MIXTURE
    swap_pairs: ClassVar[tuple[tuple[int, int], ...]] = ((1, 2),)

    def base_names(self) -> list[str]:
        return ["log_alpha", "log_beta1", "log_beta2", "logit_w"]

    def natural_names(self) -> list[str]:
        return ["alpha", "beta1", "beta2", "w"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        alpha = np.exp(base[0] + np.asarray(eta, dtype=float))
        return {
            "alpha1": alpha,
            "alpha2": alpha,
            "beta1": np.exp(base[1:2]),
            "beta2": np.exp(base[2:3]),
            "w": expit(base[3:4]),
        }

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        return [math.exp(base[0]), math.exp(base[1]), math.exp(base[2]), float(expit(base[3]))]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        alpha, beta1, beta2, w = _require(values, "alpha", "beta1", "beta2", "w")
        if not 0 < w < 1:
            raise DomainError("mixture weight w must lie in (0, 1)")
        return np.array(
            [
                _log_positive("alpha", alpha),
                _log_positive("beta1", beta1),
                _log_positive("beta2", beta2),
                logit(w),
            ]
        )

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        beta = _shape_start(dispersion)
        return np.array([math.log(beta * mean / self.t), math.log(2.0 * beta), math.log(0.5 * beta), 0.0])


@register_family
class ERPGammaAlphaMixtureFamily(_ERPGammaMixture):
    """
    共享形状 β, 速率 α₁ / α₂
    """

    name: ClassVar[Family] = Family.ERP_GAMMA_ALPHA_MIXTURE
    swap_pairs: ClassVar[tuple[tuple[int, int], ...]] = ((0, 1),)

    def base_names(self) -> list[str]:
        return ["log_alpha1", "log_alpha2", "log_beta", "logit_w"]

    def natural_names(self) -> list[str]:
        return ["alpha1", "alpha2", "beta", "w"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        eta = np.asarray(eta, dtype=float)
        beta = np.exp(base[2:3])
        return {
            "alpha1": np.exp(base[0] + eta),
            "alpha2": np.exp(base[1] + eta),
            "beta1": beta,
            "beta2": beta,
            "w": expit(base[3:4]),
        }

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        return [math.exp(base[0]), math.exp(base[1]), math.exp(base[2]), float(expit(base[3]))]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        alpha1, alpha2, beta, w = _require(values, "alpha1", "alpha2", "beta", "w")
        if not 0 < w < 1:
            raise DomainError("mixture weight w must lie in (0, 1)")
        return np.array(
            [
                _log_positive("alpha1", alpha1),
                _log_positive("alpha2", alpha2),
                _log_positive("beta", beta),
                logit(w),
            ]
        )

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        beta = _shape_start(dispersion)
        alpha = beta * mean / self.t
        return np.array([math.log(1.5 * alpha), math.log(alpha / 1.5), math.log(beta), 0.0])
# endregion
# ============================================
