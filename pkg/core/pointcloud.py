# core/pointcloud.py
"""
持續同調近似器 - 點雲工具
合成資料取樣、子抽樣、擾動與距離矩陣

功能：
1. 環面、球面與圓環的可重現取樣
2. 有放回 / 無放回的自助子抽樣
3. 點雲與度量空間的高斯擾動
4. 由種子與索引衍生獨立亂數流
"""

import logging
from typing import Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from data.models import FiniteMetricSpace, PointCloud
from utils.errors import ArgumentError
from utils.validators import require_non_negative, require_positive, require_positive_int

logger = logging.getLogger("持續同調近似器.PointCloud")

Data = Union[PointCloud, FiniteMetricSpace]
Seed = Union[int, np.random.SeedSequence]


def derive_seed(master_seed: int, *indices: int) -> np.random.SeedSequence:
    """由主種子與索引雜湊出子亂數流，與執行緒排程無關"""
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in indices))


def _rng(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_radii(outer_radius: float, inner_radius: float):
    if not (0 < inner_radius < outer_radius):
        raise ArgumentError(f"需要 0 < inner_radius < outer_radius，收到 {inner_radius}, {outer_radius}")


# ------ 合成取樣 ------


def sample_torus(N: int, outer_radius: float, inner_radius: float, seed: Seed) -> PointCloud:
    """
    在 ℝ³ 的環面上取樣，兩個角度皆在 [0, 2π) 均勻分布

    Args:
        N: 點數
        outer_radius: 管中心圓半徑 R
        inner_radius: 管半徑 r
        seed: 亂數種子

    Returns:
        PointCloud: N×3 點雲
    """
    N = require_positive_int(N, "N")
    _check_radii(outer_radius, inner_radius)

    rng = _rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, N)
    phi = rng.uniform(0.0, 2 * np.pi, N)
    ring = outer_radius + inner_radius * np.cos(phi)
    points = np.column_stack([ring * np.cos(theta), ring * np.sin(theta), inner_radius * np.sin(phi)])
    return PointCloud(points)


def sample_sphere(N: int, radius: float, ambient_dim: int, seed: Seed) -> PointCloud:
    """
    以高斯正規化在 S^{ambient_dim-1} 上均勻取樣

    Args:
        N: 點數
        radius: 球面半徑
        ambient_dim: 外圍空間維度（≥ 2）
        seed: 亂數種子

    Returns:
        PointCloud: N×ambient_dim 點雲
    """
    N = require_positive_int(N, "N")
    radius = require_positive(radius, "radius")
    if int(ambient_dim) != ambient_dim or ambient_dim < 2:
        raise ArgumentError(f"ambient_dim 必須是 ≥ 2 的整數，收到 {ambient_dim}")

    rng = _rng(seed)
    gauss = rng.standard_normal((N, int(ambient_dim)))
    norms = np.linalg.norm(gauss, axis=1)
    # 零向量機率為零，仍重抽以保證可正規化
    while np.any(norms == 0):
        bad = norms == 0
        gauss[bad] = rng.standard_normal((int(bad.sum()), int(ambient_dim)))
        norms = np.linalg.norm(gauss, axis=1)
    return PointCloud(radius * gauss / norms[:, None])


def sample_annulus(N: int, outer_radius: float, inner_radius: float, seed: Seed) -> PointCloud:
    """依面積均勻在平面圓環上取樣"""
    N = require_positive_int(N, "N")
    _check_radii(outer_radius, inner_radius)

    rng = _rng(seed)
    radii = np.sqrt(rng.uniform(inner_radius**2, outer_radius**2, N))
    radii = np.clip(radii, inner_radius, outer_radius)
    angles = rng.uniform(0.0, 2 * np.pi, N)
    return PointCloud(np.column_stack([radii * np.cos(angles), radii * np.sin(angles)]))


# ------ 子抽樣與擾動 ------


def subsample(X: Data, n: int, seed: Seed, with_replacement: bool = False) -> np.ndarray:
    """
    抽取 n 個索引

    Args:
        X: 點雲或度量空間
        n: 子樣本大小
        seed: 亂數種子或 SeedSequence
        with_replacement: True 時為經驗測度下的 i.i.d. 均勻抽樣

    Returns:
        np.ndarray: 長度 n 的索引陣列
    """
    n = require_positive_int(n, "n")
    N = len(X)
    if not with_replacement and n > N:
        raise ArgumentError(f"無放回抽樣需要 n ≤ N，收到 n={n}, N={N}")

    rng = _rng(seed)
    if with_replacement:
        return rng.integers(0, N, size=n)
    return rng.choice(N, size=n, replace=False)


def restrict(X: Data, indices: Sequence[int]) -> Data:
    """取出子樣本；度量空間取誘導子矩陣"""
    indices = np.asarray(indices, dtype=np.intp)
    if isinstance(X, FiniteMetricSpace):
        return FiniteMetricSpace(X.dist[np.ix_(indices, indices)])
    return PointCloud(X.points[indices])


def perturb(X: Data, sigma: float, seed: Seed) -> Data:
    """
    加入獨立高斯雜訊 𝒩(0, sigma)

    點雲逐座標擾動；度量空間只擾動 i<j 的項並鏡射，結果截斷於 0，對角線維持 0。
    sigma = 0 時原樣返回。
    """
    sigma = require_non_negative(sigma, "sigma")
    if sigma == 0:
        return X

    rng = _rng(seed)
    if isinstance(X, FiniteMetricSpace):
        N = len(X)
        upper = np.triu_indices(N, k=1)
        dist = X.dist.copy()
        dist[upper] = np.maximum(dist[upper] + rng.normal(0.0, sigma, upper[0].size), 0.0)
        dist.T[upper] = dist[upper]
        np.fill_diagonal(dist, 0.0)
        return FiniteMetricSpace(dist)

    return PointCloud(X.points + rng.normal(0.0, sigma, X.points.shape))


def distance_matrix(X: Data) -> np.ndarray:
    """點雲的歐氏距離矩陣；度量空間直接回傳其矩陣"""
    if isinstance(X, FiniteMetricSpace):
        return X.dist
    if len(X) == 1:
        return np.zeros((1, 1))
    return squareform(pdist(X.points))


def as_metric_space(X: Data) -> FiniteMetricSpace:
    if isinstance(X, FiniteMetricSpace):
        return X
    return FiniteMetricSpace(distance_matrix(X))
