# tests/conftest.py
"""
持續同調近似器 - 測試共用設施
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from data.models import FiniteMetricSpace, PersistenceDiagram, PointCloud  # noqa: E402
from utils.config import reset as reset_config  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_workspace(tmp_path, monkeypatch):
    """每個測試在獨立目錄中執行並使用預設設定"""
    monkeypatch.chdir(tmp_path)
    reset_config()
    yield tmp_path
    reset_config()


@pytest.fixture
def unit_square() -> PointCloud:
    return PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture
def equilateral() -> FiniteMetricSpace:
    return FiniteMetricSpace(np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]))


def random_diagram(rng: np.random.Generator, size: int, hom_dim: int = 1, essential=()) -> PersistenceDiagram:
    """出生值在 [0, 1)，持續度在 [0.05, 1) 的隨機持續圖"""
    births = rng.uniform(0.0, 1.0, size)
    deaths = births + rng.uniform(0.05, 1.0, size)
    return PersistenceDiagram.from_pairs(hom_dim, list(zip(births.tolist(), deaths.tolist())), essential)
