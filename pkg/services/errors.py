"""
描述: 错误类型
主要功能:
    - 参数域错误、数据错误与数值失败的统一层次
依赖: 标准库
"""

from __future__ import annotations


class RenewalCountError(Exception):
    """
    基础错误
    """


class DomainError(RenewalCountError, ValueError):
    """
    参数超出定义域
    """


class DataError(RenewalCountError, ValueError):
    """
    数据集格式或内容错误
    """


class NumericalFailureError(RenewalCountError, RuntimeError):
    """
    数值计算失败 (例如概率显著为负)
    """


class SeriesNonConvergenceError(NumericalFailureError):
    """
    级数在项数上限内未收敛
    """

    def __init__(self, message: str, partial_sum: float, terms: int) -> None:
        super().__init__(f"{message} (partial sum {partial_sum!r} after {terms} terms)")
        self.partial_sum = partial_sum
        self.terms = terms
