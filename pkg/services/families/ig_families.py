"""
描述: 逆高斯间隔时间的计数分布族 (RP-IG, ERP-IG)
依赖: numpy, services.renewal_ig_service, services.family_registry
"""

from __future__ import annotations

import math
from typing import ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from schemas.model import Family
from services.errors import DomainError
from services.family_registry import BaseFamily, Rates, register_family
from services.renewal_ig_service import (
    erp_ig_pmf_array,
    erp_ig_survival_array,
    rp_ig_pmf_array,
    rp_ig_survival_array,
)
from services.sampling_service import RngStream, erp_ig_counts, rp_ig_counts

DISPERSION_START_RANGE = (0.05, 20.0)


class _InverseGaussianFamily(BaseFamily):
    """
    μ_i = μ exp(-𝛃ᵀx_i), λ_i = λ exp(-𝛃ᵀx_i), 比值 λ/μ 不随协变量变化
    """

    def base_names(self) -> list[str]:
        return ["log_mu", "log_lambda"]

    def natural_names(self) -> list[str]:
        return ["mu", "lambda"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        damping = np.exp(-np.asarray(eta, dtype=float))
        return {"mu": np.exp(base[0]) * damping, "lam": np.exp(base[1]) * damping}

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        return [math.exp(base[0]), math.exp(base[1])]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        lam = values.get("lambda", values.get("lam"))
        if "mu" not in values or lam is None:
            raise DomainError("inverse-Gaussian families need mu and lambda")
        if not (values["mu"] > 0 and lam > 0):
            raise DomainError("mu and lambda must be > 0")
        return np.array([math.log(values["mu"]), math.log(lam)])

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        # var/mean ≈ μ/λ
        low, high = DISPERSION_START_RANGE
        mu = self.t / mean
        return np.array([math.log(mu), math.log(mu / float(np.clip(dispersion, low, high)))])


@register_family
class RPIGFamily(_InverseGaussianFamily):
    name: ClassVar[Family] = Family.RP_IG
    log_linear_mean: ClassVar[bool] = False

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return rp_ig_pmf_array(n, rates["mu"], rates["lam"], self.t)

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return rp_ig_survival_array(n, rates["mu"], rates["lam"], self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return self.survival_sum_mean(rates, self.t / rates["mu"])

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return rp_ig_counts(rates["mu"], rates["lam"], self.t, rng, size)


@register_family
class ERPIGFamily(_InverseGaussianFamily):
    name: ClassVar[Family] = Family.ERP_IG

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return erp_ig_pmf_array(n, rates["mu"], rates["lam"], self.t)

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        return erp_ig_survival_array(n, rates["mu"], rates["lam"], self.t)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return self.t / rates["mu"]

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return erp_ig_counts(rates["mu"], rates["lam"], self.t, rng, size)
