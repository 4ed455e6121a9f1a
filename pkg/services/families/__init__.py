"""
描述: 分布族模块初始化
主要功能:
    - 导入即注册全部计数分布族
依赖: poisson, gamma_families, ig_families
"""

from .gamma_families import (
    ERPGammaAlphaMixtureFamily,
    ERPGammaBetaMixtureFamily,
    ERPGammaFamily,
    RPGammaFamily,
    RPGammaHurdleFamily,
)
from .ig_families import ERPIGFamily, RPIGFamily
from .poisson import PoissonFamily

__all__ = [
    "PoissonFamily",
    "RPGammaFamily",
    "ERPGammaFamily",
    "ERPGammaBetaMixtureFamily",
    "ERPGammaAlphaMixtureFamily",
    "RPGammaHurdleFamily",
    "RPIGFamily",
    "ERPIGFamily",
]
