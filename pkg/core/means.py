# core/means.py
"""
持續同調近似器 - 集中趨勢估計
平均持續測度、測度量化與貪婪弗雷歇平均

功能：
1. 平均持續測度 D̄ = (1/B) Σ D_i，保留分母 B
2. Lloyd 式量化：k 個質心格子加一個對角線格子
3. 弗雷歇平均：逐次 W₂ 匹配與夥伴平均
4. 弗雷歇函數值
5. 指定中心附近的質心初始化
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import linear_sum_assignment

from core.diagram_measure import diagonal_distance, pairwise_distance, total_persistence, diagram_to_measure
from core.transport import _augmented_costs, _pairs_from_assignment, wasserstein
from data.input_data import FrechetConfig, QuantizationConfig
from data.models import DIAGONAL, PersistenceDiagram, PersistenceMeasure
from data.result_data import FrechetResult, QuantizationResult
from utils.config import get_config
from utils.errors import ArgumentError
from utils.logging import log_function_call

logger = logging.getLogger("持續同調近似器.Means")


def _common_hom_dim(diagrams: Sequence[PersistenceDiagram]) -> int:
    if not diagrams:
        raise ArgumentError("至少需要一張持續圖")
    dims = {D.homology_dim for D in diagrams}
    if len(dims) > 1:
        raise ArgumentError(f"持續圖的同調維度不一致: {sorted(dims)}")
    return dims.pop()


# ------ 平均持續測度 ------


def mean_measure(diagrams: Sequence[PersistenceDiagram]) -> PersistenceMeasure:
    """
    D̄ = (1/B) Σ D_i

    所有有限點合併計數後除以 B，座標相同的原子合併；本質類不納入。

    Args:
        diagrams: B ≥ 1 張同一維度的持續圖

    Returns:
        PersistenceMeasure: mass_denominator = B
    """
    hom_dim = _common_hom_dim(diagrams)
    B = len(diagrams)
    stacked = [D.expanded() for D in diagrams if D.points]
    if not stacked:
        return PersistenceMeasure.empty(hom_dim, mass_denominator=B)

    points, counts = np.unique(np.vstack(stacked), axis=0, return_counts=True)
    return PersistenceMeasure(points, counts / B, hom_dim, mass_denominator=B)


# ------ 量化 ------


def _cell_cost(points: np.ndarray, weights: np.ndarray, center: np.ndarray, p: float, q: float) -> float:
    return float(np.dot(weights, pairwise_distance(points, center, q)[:, 0]**p))


def _p_center(points: np.ndarray, weights: np.ndarray, start: np.ndarray, p: float, q: float) -> np.ndarray:
    """
    加權 p 中心：p = q = 2 為加權平均，其餘以 Weiszfeld 式迭代重加權平均，
    只接受使格子成本下降的結果
    """
    if p == 2 and q == 2:
        return np.average(points, axis=0, weights=weights)

    iterations = int(get_config("means.weiszfeld_iter", 30))
    tol = float(get_config("means.weiszfeld_tol", 1e-9))
    center = start.astype(np.float64)
    for _ in range(iterations):
        distances = np.maximum(pairwise_distance(points, center, q)[:, 0], 1e-12)
        coef = weights * distances**(p - 2)
        updated = coef @ points / coef.sum()
        shift = float(np.abs(updated - center).max())
        center = updated
        if shift <= tol:
            break

    if _cell_cost(points, weights, center, p, q) <= _cell_cost(points, weights, start, p, q):
        return center
    return start


def _greedy_init(mu: PersistenceMeasure, k: int) -> np.ndarray:
    """依持續度由高至低挑選前 k 個原子，同持續度維持字典序"""
    persistence = mu.points[:, 1] - mu.points[:, 0]
    order = np.argsort(-persistence, kind="stable")
    return mu.points[order[:k]].copy()


def centroids_around(center: Sequence[float], count: int, spread: float, seed: int = 0) -> np.ndarray:
    """
    在中心附近產生 count 個確定性的抖動質心，皆位於對角線上方

    Args:
        center: (birth, death) 中心
        count: 質心數量
        spread: 每個座標的最大偏移
        seed: 亂數種子
    """
    if count < 1:
        raise ArgumentError(f"count 必須 ≥ 1，收到 {count}")
    center = np.asarray(center, dtype=np.float64)
    if count == 1:
        return center.reshape(1, 2)
    rng = np.random.default_rng(seed)
    points = center + rng.uniform(-spread, spread, size=(count, 2))
    floor = points[:, 0] + max(spread, 1e-9) * 1e-3
    points[:, 1] = np.maximum(points[:, 1], floor)
    return points


@log_function_call()
def quantize(mu: PersistenceMeasure, cfg: QuantizationConfig) -> QuantizationResult:
    """
    以 Lloyd 交替最小化 OT_p^p(μ̂, μ)

    (1) 每個原子指派給 {質心, 對角線} 中 q 距離最近者（平手時偏好質心）；
    (2) 每個質心移到其格子的加權 p 中心。空格子的質心移除並記錄於軌跡。
    相對改善低於 rel_tol 或達到 max_iter 時停止。

    Args:
        mu: 非空持續測度
        cfg: 量化設定

    Returns:
        QuantizationResult: 質心測度（格子質量）、四捨五入重數的圖、最終損失與軌跡
    """
    if len(mu) == 0:
        raise ArgumentError("無法量化空測度")
    p = float(cfg.p)
    q = p if cfg.q is None else float(cfg.q)

    X, w = mu.points, mu.masses
    to_diagonal = diagonal_distance(X, q)**p
    centroids = cfg.init.copy() if cfg.init is not None else _greedy_init(mu, cfg.k)

    trace: List[Dict] = []
    previous = None
    dropped = 0
    for iteration in range(cfg.max_iter + 1):
        costs = np.column_stack([pairwise_distance(X, centroids, q)**p, to_diagonal])
        assign = costs.argmin(axis=1)
        loss = float(np.dot(w, costs[np.arange(X.shape[0]), assign]))
        trace.append({"iteration": iteration, "loss": loss, "centroids": int(centroids.shape[0]), "dropped": dropped})

        if previous is not None and previous - loss <= cfg.rel_tol * previous:
            break
        if iteration == cfg.max_iter:
            break

        updated = []
        dropped = 0
        for j in range(centroids.shape[0]):
            cell = assign == j
            if not np.any(cell):
                dropped += 1
                continue
            updated.append(_p_center(X[cell], w[cell], centroids[j], p, q))
        centroids = np.array(updated, dtype=np.float64).reshape(-1, 2)
        previous = loss

    K = centroids.shape[0]
    cell_mass = np.bincount(assign, weights=w, minlength=K + 1)[:K]
    occupied = cell_mass > 0
    masses = cell_mass[occupied]
    if mu.mass_denominator is not None:
        den = mu.mass_denominator
        masses = np.maximum(np.rint(masses * den), 1) / den

    measure = PersistenceMeasure(centroids[occupied], masses, mu.hom_dim, mu.mass_denominator)
    # 重數取 mass·B 的最近整數
    scale = mu.mass_denominator or 1
    diagram = PersistenceDiagram(mu.hom_dim, [(x, y, max(1, int(round(m * scale))))
                                              for (x, y), m in zip(measure.points.tolist(), measure.masses.tolist())])
    logger.info(f"量化完成: {len(measure)} 個質心, 損失 {loss:.6g}, 迭代 {len(trace) - 1} 次")
    return QuantizationResult(measure, diagram, loss, trace)


# ------ 弗雷歇平均 ------


def finite_part(D: PersistenceDiagram) -> PersistenceDiagram:
    """去除本質類，只保留有限點"""
    if not D.essential:
        return D
    return PersistenceDiagram(D.homology_dim, list(D.points), [])


def _w2_matching(Y: np.ndarray, X: np.ndarray) -> Tuple[Tuple[Tuple[int, int], ...], float]:
    """估計點 Y 與輸入點 X 的最佳 W₂ 匹配（q = 2），回傳配對與平方成本"""
    n1, n2 = Y.shape[0], X.shape[0]
    if n1 + n2 == 0:
        return (), 0.0
    costs, _ = _augmented_costs(Y, X, 2.0, 2.0)
    rows, cols = linear_sum_assignment(costs)
    pairs = tuple(sorted(_pairs_from_assignment(rows, cols, n1, n2)))
    return pairs, float(costs[rows, cols].sum())


def _canonical(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if points.shape[0] == 0:
        return points
    return points[np.lexsort((points[:, 1], points[:, 0]))]


def _partner_mean(partners: List[np.ndarray], diagonal_count: int, B: int) -> np.ndarray:
    """
    B 個夥伴的自洽平均：對角線夥伴貢獻估計點本身的投影

    y = (S + m·proj(y)) / B 的解：沿對角線分量為 mid(S)/r，法向分量為 half(S)/B，
    其中 S 為 r 個實際夥伴之和。m = 0 時以最小夥伴為基準累加差值。
    """
    stacked = np.array(partners, dtype=np.float64)
    if diagonal_count == 0:
        base = stacked[np.lexsort((stacked[:, 1], stacked[:, 0]))[0]]
        return np.array([base[c] + math.fsum((stacked[:, c] - base[c]).tolist()) / B for c in range(2)])

    r = len(partners)
    s_birth = math.fsum(stacked[:, 0].tolist())
    s_death = math.fsum(stacked[:, 1].tolist())
    mid = (s_birth + s_death) / 2 / r
    half = (s_death - s_birth) / 2 / B
    return np.array([mid - half, mid + half])


def frechet_function(candidate: PersistenceDiagram, diagrams: Sequence[PersistenceDiagram]) -> float:
    """(1/B) Σ W₂²(candidate, D_i)，q = 2，只計有限點"""
    if not diagrams:
        raise ArgumentError("至少需要一張持續圖")
    candidate = finite_part(candidate)
    values = [wasserstein(candidate, finite_part(D), 2.0, 2.0)[1].cost for D in diagrams]
    return math.fsum(values) / len(diagrams)


def _initial_estimate(diagrams: Sequence[PersistenceDiagram], cfg: FrechetConfig) -> np.ndarray:
    if isinstance(cfg.init, PersistenceDiagram):
        return cfg.init.expanded()
    B = len(diagrams)
    if cfg.init == "random":
        index = int(np.random.default_rng(cfg.seed).integers(B))
    elif cfg.init == "median":
        totals = [total_persistence(diagram_to_measure(D), 2.0, 2.0) for D in diagrams]
        index = sorted(range(B), key=lambda i: (totals[i], i))[(B - 1) // 2]
    else:
        index = int(cfg.init)
        if not 0 <= index < B:
            raise ArgumentError(f"初始圖索引超出範圍: {index}")
    return diagrams[index].expanded()


@log_function_call()
def frechet_mean(diagrams: Sequence[PersistenceDiagram], cfg: Optional[FrechetConfig] = None) -> FrechetResult:
    """
    貪婪弗雷歇平均（p = q = 2）

    每輪對每張輸入圖計算到目前估計的最佳 W₂ 匹配，再把每個估計點換成其 B 個夥伴的平均，
    對角線夥伴貢獻估計點的投影；夥伴全為對角線的點刪除，未匹配的輸入點 x 產生候選
    (x + (B−1)·proj(x)) / B。匹配不變且上一輪沒有增刪時即為不動點。本質類不參與。

    Args:
        diagrams: B ≥ 1 張同一維度的持續圖
        cfg: 初始化與迭代上限

    Returns:
        FrechetResult: 局部極小的平均圖、弗雷歇函數值與軌跡
    """
    cfg = cfg or FrechetConfig()
    hom_dim = _common_hom_dim(diagrams)
    B = len(diagrams)
    inputs = [_canonical(D.expanded()) for D in diagrams]
    near_diagonal = float(get_config("means.near_diagonal", 1e-3))

    estimate = _canonical(_initial_estimate(diagrams, cfg))
    trace: List[Dict] = []
    previous_structure = None
    changes = None
    converged = False
    value = math.inf

    for iteration in range(cfg.max_iter + 1):
        results = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(delayed(_w2_matching)(estimate, X) for X in inputs)
        structure = tuple(pairs for pairs, _ in results)
        value = math.fsum(cost for _, cost in results) / B
        persistence = estimate[:, 1] - estimate[:, 0] if estimate.size else np.zeros(0)
        trace.append({
            "iteration": iteration,
            "frechet_value": value,
            "points": int(estimate.shape[0]),
            "structural_changes": changes or 0,
            "near_diagonal": int(np.sum(persistence < near_diagonal))
        })

        if structure == previous_structure and changes == 0:
            converged = True
            break
        if iteration == cfg.max_iter:
            break

        partners: List[List[np.ndarray]] = [[] for _ in range(estimate.shape[0])]
        diagonal_counts = np.zeros(estimate.shape[0], dtype=int)
        spawned = []
        for X, pairs in zip(inputs, structure):
            for k, j in pairs:
                if k == DIAGONAL:
                    x = X[j]
                    mid = (x[0] + x[1]) / 2
                    half = (x[1] - x[0]) / 2 / B
                    spawned.append((mid - half, mid + half))
                elif j == DIAGONAL:
                    diagonal_counts[k] += 1
                else:
                    partners[k].append(X[j])

        updated = [
            _partner_mean(partners[k], int(diagonal_counts[k]), B) for k in range(estimate.shape[0]) if partners[k]
        ]
        deleted = estimate.shape[0] - len(updated)
        estimate = _canonical(np.array(updated + spawned, dtype=np.float64))
        changes = deleted + len(spawned)
        previous_structure = structure

    diagram = PersistenceDiagram(hom_dim, [(x, y, 1) for x, y in estimate.tolist()])
    logger.info(f"弗雷歇平均: {diagram.n_points} 點, 函數值 {value:.6g}, {'收斂' if converged else '達迭代上限'}")
    return FrechetResult(diagram, value, trace, converged)
