"""
描述: 测试工具
主要功能:
    - 按分布族模拟回归数据
    - 抽样频率与理论概率的比较
依赖: numpy
"""

from __future__ import annotations

import numpy as np

import services.families  # noqa: F401
from schemas.model import ModelSpec, RegressionDesign
from services.family_registry import FamilyRegistry
from services.sampling_service import RngStream

FERTILITY_COVARIATES = ["age_z", "muslim", "university", "rural"]


def simulate_design(
    spec: ModelSpec,
    values: dict[str, float],
    n: int,
    seed: int,
    coefficients: list[float] | None = None,
) -> RegressionDesign:
    """
    按分布族抽样得到回归数据; 给出系数时附带标准正态协变量
    """

    coefficients = list(coefficients or [])
    family = FamilyRegistry.create(spec, len(coefficients))
    rng = RngStream(seed)
    matrix = rng.normal((n, len(coefficients))) if coefficients else None
    theta = family.theta_from_natural(values, coefficients)
    counts = family.sample(family.rates(theta, matrix), rng, n)
    return RegressionDesign(
        counts=[int(c) for c in counts],
        covariates=None if matrix is None else matrix.tolist(),
    )


def assert_matches_pmf(draws: np.ndarray, pmf: np.ndarray, min_expected: float = 10.0) -> None:
    """
    经验频率与理论概率相差不超过 4 个二项标准误 (只比较期望频数 >= min_expected 的格)
    """

    size = draws.size
    pmf = np.ravel(pmf)
    observed = np.bincount(draws, minlength=pmf.size)[: pmf.size] / size
    checked = 0
    for n, p in enumerate(pmf):
        if p * size < min_expected:
            continue
        se = np.sqrt(p * (1.0 - p) / size)
        assert abs(observed[n] - p) <= 4.0 * se, f"n={n}: observed {observed[n]}, expected {p}"
        checked += 1
    assert checked > 0
