"""
描述: 计数分布族注册与管理
主要功能:
    - BaseFamily 基类定义 (参数变换、协变量连接、概率、抽样)
    - FamilyRegistry 分布族注册表
    - 分布族注册装饰器
依赖: pydantic, numpy
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import ClassVar, Type

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from config.settings import get_settings
from schemas.model import Family, ModelSpec
from services.errors import DomainError
from services.renewal_common import truncation_point
from services.sampling_service import RngStream

# 逐观测自然参数, 如 {"alpha": 数组, "beta": 数组}
Rates = dict[str, NDArray[np.float64]]


def coefficient_name(covariate: str) -> str:
    return f"coef[{covariate}]"


def logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def expit(x: ArrayLike) -> NDArray[np.float64]:
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


# ============================================
# region BaseFamily
# ============================================
class BaseFamily(BaseModel, ABC):
    """
    分布族基类

    参数向量 θ 由变换后的基础参数 (对数、logit 等, 无约束) 与回归系数组成,
    协变量经 η = 𝛃ᵀx 进入 link()。
    """

    name: ClassVar[Family]
    log_linear_mean: ClassVar[bool] = True
    multi_start: ClassVar[bool] = False

    t: float = Field(1.0, gt=0, description="观测时长")
    hurdle_m: int | None = Field(None, ge=1, description="跨栏位置")
    n_covariates: int = Field(0, ge=0, description="协变量个数")

    model_config = ConfigDict(extra="forbid", frozen=True)

    # ---------- 需由子类实现 ----------
    @abstractmethod
    def base_names(self) -> list[str]:
        """
        变换后基础参数名
        """

    @abstractmethod
    def natural_names(self) -> list[str]:
        """
        自然尺度基础参数名 (报告用)
        """

    @abstractmethod
    def link(self, base: NDArray[np.float64], eta: ArrayLike) -> Rates:
        """
        基础参数与线性预测 η 映射为逐观测自然参数
        """

    @abstractmethod
    def pmf(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        """
        逐观测概率 Prob(N = n)
        """

    @abstractmethod
    def survival(self, n: NDArray[np.int64], rates: Rates) -> NDArray[np.float64]:
        """
        逐观测计数生存函数 Prob(N >= n), n >= 1
        """

    @abstractmethod
    def natural_base(self, base: NDArray[np.float64]) -> list[float]:
        """
        基础参数的自然尺度值, 顺序同 natural_names()
        """

    @abstractmethod
    def base_from_natural(self, values: dict[str, float]) -> NDArray[np.float64]:
        """
        natural_base 的逆映射 (自然参数名 -> 变换后基础参数)
        """

    @abstractmethod
    def moment_start(self, mean: float, dispersion: float) -> NDArray[np.float64]:
        """
        由 x = 0 处的计数均值与离散比 var/mean 给出初值
        """

    @abstractmethod
    def sample(self, rates: Rates, rng: RngStream, size: int) -> NDArray[np.int64]:
        """
        逐次参数的计数抽样
        """

    @abstractmethod
    def mean(self, rates: Rates) -> NDArray[np.float64]:
        """
        逐观测均值 E N(t)
        """

    # ---------- 公共方法 ----------
    @property
    def n_base(self) -> int:
        return len(self.base_names())

    def parameter_names(self, covariate_names: list[str]) -> list[str]:
        return self.base_names() + [coefficient_name(c) for c in covariate_names]

    def reported_names(self, covariate_names: list[str]) -> list[str]:
        return self.natural_names() + [coefficient_name(c) for c in covariate_names]

    def split(self, theta: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        theta = np.asarray(theta, dtype=float)
        expected = self.n_base + self.n_covariates
        if theta.shape != (expected,):
            raise DomainError(f"{self.name.value} expects {expected} parameters, got {theta.shape}")
        return theta[: self.n_base], theta[self.n_base :]

    def linear_predictor(
        self, coefficients: NDArray[np.float64], covariates: NDArray[np.float64] | None
    ) -> NDArray[np.float64]:
        if covariates is None or coefficients.size == 0:
            return np.zeros(1)
        return covariates @ coefficients

    def rates(self, theta: ArrayLike, covariates: NDArray[np.float64] | None = None) -> Rates:
        """
        θ 与协变量矩阵 -> 逐观测自然参数; 参数非有限或非正时抛 DomainError
        """

        base, coefficients = self.split(theta)
        with np.errstate(over="ignore"):
            rates = self.link(base, self.linear_predictor(coefficients, covariates))
        for key, value in rates.items():
            if not np.all(np.isfinite(value)):
                raise DomainError(f"{key} is not finite")
        return rates

    def canonical_base(self, base: NDArray[np.float64]) -> NDArray[np.float64]:
        """
        同一似然的等价参数中选定一个代表; 默认原样返回
        """

        return base

    def canonical_theta(self, theta: ArrayLike) -> NDArray[np.float64]:
        base, coefficients = self.split(theta)
        return np.concatenate([self.canonical_base(base), coefficients])

    def natural(self, theta: ArrayLike) -> list[float]:
        """
        θ 的自然尺度值, 顺序同 reported_names(); 连续映射, 不交换分量标签
        """

        base, coefficients = self.split(theta)
        return self.natural_base(base) + [float(c) for c in coefficients]

    def theta_from_natural(
        self, values: dict[str, float], coefficients: list[float] | None = None
    ) -> NDArray[np.float64]:
        coefficients = list(coefficients or [])
        if len(coefficients) != self.n_covariates:
            raise DomainError(
                f"{self.name.value} expects {self.n_covariates} coefficients, got {len(coefficients)}"
            )
        return np.concatenate([self.base_from_natural(values), np.asarray(coefficients, dtype=float)])

    def start_points(
        self,
        mean: float,
        dispersion: float,
        coefficients: NDArray[np.float64],
        rng: RngStream,
        n_starts: int | None = None,
    ) -> list[NDArray[np.float64]]:
        """
        初值: 矩估计; 多起点分布族另加泊松初值与扰动初值 (至少 3 个)

        参数:
            mean: x = 0 处的计数均值
            dispersion: 离散比 var/mean
            coefficients: 泊松回归给出的系数初值
            rng: 扰动用随机数流
            n_starts: 起点个数, 默认 OptimizerSettings.n_starts
        返回:
            变换尺度初值列表
        """

        first = np.concatenate([self.moment_start(mean, dispersion), coefficients])
        if not self.multi_start:
            return [first]
        optimizer = get_settings().optimizer
        wanted = max(n_starts or optimizer.n_starts, 3)
        starts = [first, np.concatenate([self.moment_start(mean, 1.0), coefficients])]
        while len(starts) < wanted:
            starts.append(first + rng.normal(first.size) * optimizer.perturb_scale)
        return starts

    def survival_sum_mean(self, rates: Rates, guess: ArrayLike) -> NDArray[np.float64]:
        """
        E N = Σ_{n>=1} Prob(N >= n), 逐观测求和到尾部小于 survival_tol
        """

        numerics = get_settings().numerics
        guess = np.atleast_1d(np.asarray(guess, dtype=float))
        cap = max(numerics.nmax_floor, int(math.ceil(numerics.nmax_mean_factor * float(np.max(guess)))))
        shaped = {key: np.atleast_1d(value)[None, :] for key, value in rates.items()}
        width = max(np.atleast_1d(value).size for value in rates.values())
        total = np.zeros(width)
        start, chunk = 1, 64
        while start <= cap:
            stop = min(cap, start + chunk - 1)
            ns = np.arange(start, stop + 1, dtype=np.int64)[:, None]
            block = self.survival(ns, shaped)
            total = total + block.sum(axis=0)
            if np.all(block[-1] < numerics.survival_tol):
                break
            start = stop + 1
            chunk *= 2
        return total

    def pmf_table(self, rates: Rates, n_max: int) -> NDArray[np.float64]:
        return self.pmf(np.arange(n_max + 1, dtype=np.int64), rates)

    def truncation_point(self, rates: Rates) -> int:
        return truncation_point(
            lambda ns: np.ravel(self.survival(ns, rates)), float(np.max(self.mean(rates)))
        )
# endregion
# ============================================


# ============================================
# region FamilyRegistry
# ============================================
class FamilyRegistry:
    """
    分布族注册表 (单例)
    """

    _families: dict[Family, Type[BaseFamily]] = {}

    logger = logging.getLogger(__name__)

    @classmethod
    def register(cls, family_cls: Type[BaseFamily]) -> Type[BaseFamily]:
        """
        注册分布族类
        """
        try:
            name = getattr(family_cls, "name", None)
            if not isinstance(name, Family):
                cls.logger.error("Family name is invalid: %s", family_cls)
                return family_cls

            cls._families[name] = family_cls
        except Exception as exc:
            cls.logger.error("Failed to register family: %s", family_cls, exc_info=exc)
        return family_cls

    @classmethod
    def get_family(cls, name: Family | str) -> Type[BaseFamily] | None:
        """
        获取分布族类
        """
        try:
            return cls._families.get(Family(name))
        except ValueError:
            return None

    @classmethod
    def get_all_families(cls) -> dict[Family, Type[BaseFamily]]:
        return cls._families

    @classmethod
    def create(cls, spec: ModelSpec, n_covariates: int = 0) -> BaseFamily:
        """
        按模型设定实例化分布族

        参数:
            spec: 模型设定
            n_covariates: 协变量个数 (spec.covariates 为假时忽略)
        返回:
            分布族实例
        """
        family_cls = cls.get_family(spec.family)
        if family_cls is None:
            raise DomainError(f"family is not registered: {spec.family}")
        return family_cls(
            t=spec.t,
            hurdle_m=spec.hurdle_m,
            n_covariates=n_covariates if spec.covariates else 0,
        )

# 装饰器别名
register_family = FamilyRegistry.register
# endregion
# ============================================
