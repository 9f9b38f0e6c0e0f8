# core/diagram_measure.py
"""
持續同調近似器 - 持續測度
持續圖與離散測度的轉換、總持續度與對角線距離

功能：
1. 持續圖轉為整數質量測度（本質類另行記錄）
2. 整數質量測度轉回持續圖
3. 對角線投影與 q 範數下到對角線的距離
4. 總持續度 Pers_p
"""

import math
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from data.models import PersistenceDiagram, PersistenceMeasure
from utils.errors import ArgumentError
from utils.validators import require_finite_exponent, require_norm_index


def diagonal_projection(x: Sequence[float]) -> np.ndarray:
    """((x1+x2)/2, (x1+x2)/2)；對 q ∈ {1, 2, ∞} 同時是最近的對角線點"""
    x = np.asarray(x, dtype=np.float64)
    mid = (x[..., 0] + x[..., 1]) / 2
    return np.stack([mid, mid], axis=-1)


def diagonal_distance(points: np.ndarray, q: float) -> np.ndarray:
    """點到其對角線投影的 q 範數距離：((d − b)/2)·2^{1/q}，q = ∞ 時為 (d − b)/2"""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    half = (points[:, 1] - points[:, 0]) / 2
    if math.isinf(q):
        return half
    return half * 2.0**(1.0 / q)


def pairwise_distance(A: np.ndarray, B: np.ndarray, q: float) -> np.ndarray:
    """兩組平面點間的 q 範數距離矩陣"""
    A = np.asarray(A, dtype=np.float64).reshape(-1, 2)
    B = np.asarray(B, dtype=np.float64).reshape(-1, 2)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((A.shape[0], B.shape[0]))
    if math.isinf(q):
        return cdist(A, B, metric="chebyshev")
    if q == 1:
        return cdist(A, B, metric="cityblock")
    if q == 2:
        return cdist(A, B, metric="euclidean")
    return cdist(A, B, metric="minkowski", p=q)


def diagram_to_measure(D: PersistenceDiagram) -> PersistenceMeasure:
    """每個相異有限點一個原子，質量為重數；本質類不納入"""
    if not D.points:
        return PersistenceMeasure.empty(D.homology_dim, mass_denominator=1)
    points = np.array([(b, d) for b, d, _ in D.points], dtype=np.float64)
    masses = np.array([m for _, _, m in D.points], dtype=np.float64)
    return PersistenceMeasure(points, masses, D.homology_dim, mass_denominator=1)


def measure_to_diagram(mu: PersistenceMeasure, rounding: bool = False) -> PersistenceDiagram:
    """
    整數質量測度轉回持續圖

    Args:
        mu: 持續測度
        rounding: True 時把質量四捨五入為重數（至少 1）；False 時質量必須為整數

    Returns:
        PersistenceDiagram: 無本質類的持續圖
    """
    points = []
    for (x, y), mass in zip(mu.points.tolist(), mu.masses.tolist()):
        mult = int(round(mass))
        if rounding:
            mult = max(mult, 1)
        elif abs(mass - mult) > 1e-9 or mult < 1:
            raise ArgumentError(f"原子 ({x}, {y}) 的質量 {mass} 不是正整數")
        points.append((x, y, mult))
    return PersistenceDiagram(mu.hom_dim, points, [])


def total_persistence(mu: PersistenceMeasure, p: float, q: Optional[float] = None) -> float:
    """Pers_p(μ) = Σ mass · ‖x − x^⊤‖_q^p"""
    p = require_finite_exponent(p)
    q = require_norm_index(p if q is None else q)
    if len(mu) == 0:
        return 0.0
    return float(np.dot(mu.masses, diagonal_distance(mu.points, q)**p))


def diagram_total_persistence(D: PersistenceDiagram, p: float, q: Optional[float] = None) -> float:
    return total_persistence(diagram_to_measure(D), p, q)
