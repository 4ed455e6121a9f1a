"""
描述: 测试公共夹具
主要功能:
    - 每个测试前后清空配置缓存
    - 合成生育数据集路径
依赖: pytest
"""

from __future__ import annotations

from pathlib import Path

import pytest

from config.settings import get_settings

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def fertility_csv() -> Path:
    return REPO_ROOT / "data" / "fertility_synthetic.csv"
