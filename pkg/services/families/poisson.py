"""
描述: 泊松分布族 (β = 1 的更新过程)
依赖: numpy, services.specfun, services.family_registry
"""

from __future__ import annotations

import math
from typing import ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from schemas.model import Family
from services.errors import DomainError
from services.family_registry import BaseFamily, Rates, register_family
from services.sampling_service import RngStream, poisson_counts
from services.specfun import log_gamma, reg_lower_inc_gamma


@register_family
class PoissonFamily(BaseFamily):
    """
    泊松计数, 均值 αt

    有协变量时以 η₀ 为截距: α_i = η₀ exp(𝛃ᵀx_i) / t。
    """

    name: ClassVar[Family] = Family.POISSON

    def base_names(self) -> list[str]:
        return ["log_eta0"] if self.n_covariates else ["log_alpha"]

    def natural_names(self) -> list[str]:
        return ["alpha", "eta0"] if self.n_covariates else ["alpha"]

    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        scale = np.exp(base[0] + np.asarray(eta, dtype=float))
        return {"alpha": scale / self.t if self.n_covariates else scale}

    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        n = np.asarray(n, dtype=np.int64)
        m = rates["alpha"] * self.t
        return np.exp(n * np.log(m) - m - log_gamma(n + 1.0))

    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        n = np.asarray(n, dtype=np.int64)
        m = np.asarray(rates["alpha"] * self.t, dtype=float)
        # Prob(N >= n) = P(Gamma(n) <= m)
        values = reg_lower_inc_gamma(np.where(n > 0, n, 1).astype(float), m)
        return np.where(n > 0, values, 1.0)

    def mean(self, rates: Rates) -> NDArray[np.float64]:
        return rates["alpha"] * self.t

    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        scale = math.exp(base[0])
        if self.n_covariates:
            return [scale / self.t, scale]
        return [scale]

    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        if self.n_covariates and "eta0" in values:
            eta0 = values["eta0"]
        elif "alpha" in values:
            eta0 = values["alpha"] * self.t if self.n_covariates else values["alpha"]
        else:
            raise DomainError("poisson needs alpha (or eta0)")
        if eta0 <= 0:
            raise DomainError("poisson rate must be > 0")
        return np.array([math.log(eta0)])

    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        return np.array([math.log(mean if self.n_covariates else mean / self.t)])

    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        return poisson_counts(rates["alpha"], self.t, rng, size)
