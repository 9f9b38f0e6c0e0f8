# core/transport.py
"""
持續同調近似器 - 精確距離求解器
持續圖與持續測度之間的最佳運輸類距離，每個求解器都回傳可驗證的憑證

功能：
1. p-Wasserstein：增廣二部指派（最短增廣路徑）
2. 瓶頸距離：候選成本二分搜尋加 Hopcroft–Karp 完美匹配判定
3. 最佳部分運輸 OT_p：含對角線節點的平衡運輸問題（網路單純形）
4. p-Hausdorff：最小成本邊覆蓋化為指派
5. 成對 OT 距離矩陣
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import ot
from joblib import Parallel, delayed
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from core.diagram_measure import diagonal_distance, pairwise_distance
from data.models import (DIAGONAL, FiniteMetricSpace, Matching, MatchStatus, PersistenceDiagram, PersistenceMeasure,
                         PointCloud, TransportPlan)
from utils.config import get_config
from utils.errors import ArgumentError, DataError
from utils.validators import require_finite_exponent, require_norm_index

logger = logging.getLogger("持續同調近似器.Transport")


def _exponents(p: float, q: Optional[float]) -> Tuple[float, float]:
    p = require_finite_exponent(p)
    q = require_norm_index(p if q is None else q)
    return p, q


def _rescale_factor(p: float, *cost_arrays: np.ndarray) -> float:
    """p 夠大時以最大成本縮放，避免次方溢位"""
    if p < get_config("transport.rescale_power", 8):
        return 1.0
    largest = max((float(a.max()) for a in cost_arrays if a.size), default=0.0)
    return largest if largest > 0 else 1.0


# ------ 持續圖 ------


def _augmented_costs(X: np.ndarray, Y: np.ndarray, p: float, q: float) -> Tuple[np.ndarray, float]:
    """
    (n1+n2)×(n1+n2) 增廣成本矩陣：
    左上為點對點，右上對角塊為 X 點到對角線，左下對角塊為 Y 點到對角線，右下為 0
    """
    n1, n2 = X.shape[0], Y.shape[0]
    base = pairwise_distance(X, Y, q)
    dx = diagonal_distance(X, q)
    dy = diagonal_distance(Y, q)
    scale = _rescale_factor(p, base, dx, dy)

    size = n1 + n2
    costs = np.full((size, size), np.inf)
    costs[:n1, :n2] = (base / scale)**p
    costs[np.arange(n1), n2 + np.arange(n1)] = (dx / scale)**p
    costs[n1 + np.arange(n2), np.arange(n2)] = (dy / scale)**p
    costs[n1:, n2:] = 0.0
    return costs, scale


def _pairs_from_assignment(rows: np.ndarray, cols: np.ndarray, n1: int, n2: int) -> List[Tuple[int, int]]:
    pairs = []
    for r, c in zip(rows.tolist(), cols.tolist()):
        if r < n1 and c < n2:
            pairs.append((r, c))
        elif r < n1:
            pairs.append((r, DIAGONAL))
        elif c < n2:
            pairs.append((DIAGONAL, c))
    return pairs


def pair_costs(X: np.ndarray, Y: np.ndarray, pairs: Sequence[Tuple[int, int]], q: float) -> np.ndarray:
    """依匹配重新計算每一對的 q 範數成本"""
    costs = []
    for i, j in pairs:
        if i == DIAGONAL and j == DIAGONAL:
            costs.append(0.0)
        elif i == DIAGONAL:
            costs.append(float(diagonal_distance(Y[j], q)[0]))
        elif j == DIAGONAL:
            costs.append(float(diagonal_distance(X[i], q)[0]))
        else:
            costs.append(float(pairwise_distance(X[i], Y[j], q)[0, 0]))
    return np.asarray(costs)


def matching_cost(D1: PersistenceDiagram, D2: PersistenceDiagram, matching: Matching, p: float,
                  q: Optional[float] = None) -> float:
    """由匹配重算 Σ cost^p，p = ∞ 時為最大成本"""
    q = p if q is None else q
    costs = pair_costs(D1.expanded(), D2.expanded(), matching.pairs, q)
    if costs.size == 0:
        return 0.0
    if math.isinf(p):
        return float(costs.max())
    return float(np.sum(costs**p))


def wasserstein(D1: PersistenceDiagram, D2: PersistenceDiagram, p: float = 2.0,
                q: Optional[float] = None) -> Tuple[float, Matching]:
    """
    W_{p,q}(D1, D2)

    兩張圖的有限點加上對方點的對角線投影組成方陣，以最短增廣路徑指派求解 p 次方成本。
    本質類多重集不同時距離為 +∞，匹配狀態為 ESSENTIAL_MISMATCH。

    Args:
        D1, D2: 持續圖
        p: 有限指數 ≥ 1
        q: 範數指標，預設為 p

    Returns:
        (distance, Matching): Matching.cost 為 Σ cost^p，索引指向 expanded() 的列
    """
    p, q = _exponents(p, q)
    if D1.essential != D2.essential:
        return math.inf, Matching([], math.inf, MatchStatus.ESSENTIAL_MISMATCH)

    X, Y = D1.expanded(), D2.expanded()
    n1, n2 = X.shape[0], Y.shape[0]
    if n1 + n2 == 0:
        return 0.0, Matching([], 0.0)

    costs, scale = _augmented_costs(X, Y, p, q)
    rows, cols = linear_sum_assignment(costs)
    scaled = float(costs[rows, cols].sum())
    pairs = _pairs_from_assignment(rows, cols, n1, n2)
    return scale * scaled**(1.0 / p), Matching(pairs, scaled * scale**p)


def _dedupe(values: np.ndarray, tol: float) -> np.ndarray:
    values = np.unique(values)
    if values.size <= 1:
        return values
    keep = np.concatenate([[True], np.diff(values) > tol])
    return values[keep]


def bottleneck(D1: PersistenceDiagram, D2: PersistenceDiagram,
               q: Optional[float] = math.inf) -> Tuple[float, Matching]:
    """
    瓶頸距離

    候選值為所有點對成本與到對角線的成本；二分搜尋最小門檻，
    以門檻圖上的 Hopcroft–Karp 最大匹配判定是否存在完美匹配。
    本質類依出生值排序配對，個數不同時為 +∞。

    Returns:
        (distance, Matching): Matching.cost 為最大配對成本（含本質類）
    """
    q = require_norm_index(math.inf if q is None else q)
    if len(D1.essential) != len(D2.essential):
        return math.inf, Matching([], math.inf, MatchStatus.ESSENTIAL_MISMATCH)
    essential_cost = max((abs(a - b) for a, b in zip(D1.essential, D2.essential)), default=0.0)

    X, Y = D1.expanded(), D2.expanded()
    n1, n2 = X.shape[0], Y.shape[0]
    if n1 + n2 == 0:
        return essential_cost, Matching([], essential_cost)

    costs, _ = _augmented_costs(X, Y, 1.0, q)
    tol = get_config("transport.dedupe_tol", 1e-12)
    finite = costs[np.isfinite(costs)]
    candidates = _dedupe(finite, tol)

    def perfect_matching(threshold: float) -> Optional[np.ndarray]:
        graph = csr_matrix(costs <= threshold + tol)
        match = maximum_bipartite_matching(graph, perm_type="column")
        return match if np.all(match >= 0) else None

    low, high = 0, candidates.size - 1
    best = perfect_matching(candidates[high])
    while low < high:
        mid = (low + high) // 2
        match = perfect_matching(candidates[mid])
        if match is None:
            low = mid + 1
        else:
            best, high = match, mid

    rows = np.arange(n1 + n2)
    pairs = _pairs_from_assignment(rows, best, n1, n2)
    realized = pair_costs(X, Y, pairs, q)
    finite_cost = float(realized.max()) if realized.size else 0.0
    distance = max(finite_cost, essential_cost)
    return distance, Matching(pairs, distance)


# ------ 持續測度 ------


def _common_scale(mu: PersistenceMeasure, nu: PersistenceMeasure) -> Optional[int]:
    """兩個測度的質量分母最小公倍數，任一未知時為 None"""
    if mu.mass_denominator is None or nu.mass_denominator is None:
        return None
    return math.lcm(mu.mass_denominator, nu.mass_denominator)


def _to_diagonal(mu: PersistenceMeasure, p: float, q: float, source: bool) -> Tuple[float, TransportPlan]:
    """另一側為空測度時，全部質量直接與對角線交換"""
    costs = diagonal_distance(mu.points, q)
    scale = _rescale_factor(p, costs)
    scaled = float(np.dot(mu.masses, (costs / scale)**p))
    if source:
        flows = [(i, DIAGONAL, float(m)) for i, m in enumerate(mu.masses)]
    else:
        flows = [(DIAGONAL, j, float(m)) for j, m in enumerate(mu.masses)]
    return scale * scaled**(1.0 / p), TransportPlan(flows, scaled * scale**p)


def ot_distance(mu: PersistenceMeasure, nu: PersistenceMeasure, p: float = 2.0,
                q: Optional[float] = None) -> Tuple[float, TransportPlan]:
    """
    最佳部分運輸距離 OT_{p,q}(μ, ν)

    μ 的原子與一個「對角線」節點對上 ν 的原子與另一個「對角線」節點，
    對角線節點的供給為對方總質量，對角線到對角線成本為 0，問題因此平衡。
    兩個測度的質量分母已知時，質量先放大為整數再以網路單純形精確求解。

    Args:
        mu, nu: 持續測度
        p: 有限指數 ≥ 1
        q: 範數指標，預設為 p

    Returns:
        (distance, TransportPlan): plan.cost 為 OT_p^p
    """
    p, q = _exponents(p, q)
    m, n = len(mu), len(nu)
    if m + n == 0:
        return 0.0, TransportPlan([], 0.0)
    if m == 0 or n == 0:
        return _to_diagonal(mu if n == 0 else nu, p, q, source=(n == 0))

    base = pairwise_distance(mu.points, nu.points, q)
    d_mu = diagonal_distance(mu.points, q)
    d_nu = diagonal_distance(nu.points, q)
    scale = _rescale_factor(p, base, d_mu, d_nu)

    costs = np.zeros((m + 1, n + 1))
    costs[:m, :n] = (base / scale)**p
    costs[:m, n] = (d_mu / scale)**p
    costs[m, :n] = (d_nu / scale)**p

    multiplier = _common_scale(mu, nu)
    a = b = None
    if multiplier is not None:
        a, b = mu.integer_masses(multiplier), nu.integer_masses(multiplier)
    if a is None or b is None:
        multiplier = 1
        a, b = mu.masses.copy(), nu.masses.copy()

    supply = np.append(a, b.sum())
    demand = np.append(b, a.sum())
    plan, log = ot.emd(supply, demand, np.ascontiguousarray(costs),
                       numItermax=int(get_config("transport.emd_max_iter", 1000000)), log=True)
    if log.get("warning"):
        logger.warning(f"網路單純形未正常結束: {log['warning']}")

    scaled = float(np.sum(plan * costs)) / multiplier
    flows = []
    for i, j in zip(*np.nonzero(plan > 0)):
        if i == m and j == n:
            continue
        flows.append((DIAGONAL if i == m else int(i), DIAGONAL if j == n else int(j),
                      float(plan[i, j]) / multiplier))
    return scale * scaled**(1.0 / p), TransportPlan(flows, scaled * scale**p)


def plan_cost(mu: PersistenceMeasure, nu: PersistenceMeasure, plan: TransportPlan, p: float,
              q: Optional[float] = None) -> float:
    """由運輸計畫重算 Σ mass · cost^p"""
    q = p if q is None else q
    total = 0.0
    for i, j, mass in plan.flows:
        if i == DIAGONAL:
            cost = diagonal_distance(nu.points[j], q)[0]
        elif j == DIAGONAL:
            cost = diagonal_distance(mu.points[i], q)[0]
        else:
            cost = pairwise_distance(mu.points[i], nu.points[j], q)[0, 0]
        total += mass * float(cost)**p
    return total


def plan_marginals(mu: PersistenceMeasure, nu: PersistenceMeasure, plan: TransportPlan) -> Tuple[np.ndarray, np.ndarray]:
    """運輸計畫在 μ 與 ν 原子上的邊際"""
    out = np.zeros(len(mu))
    into = np.zeros(len(nu))
    for i, j, mass in plan.flows:
        if i != DIAGONAL:
            out[i] += mass
        if j != DIAGONAL:
            into[j] += mass
    return out, into


def _ot_value(mu: PersistenceMeasure, nu: PersistenceMeasure, p: float, q: Optional[float]) -> float:
    return ot_distance(mu, nu, p, q)[0]


def pairwise_ot_matrix(measures: Sequence[PersistenceMeasure], p: float = 2.0, q: Optional[float] = None,
                       n_jobs: int = 1) -> np.ndarray:
    """
    成對 OT 距離矩陣，對稱且對角線為 0

    Args:
        measures: 同一同調維度的測度
        p, q: 指數與範數
        n_jobs: 平行工作數，結果與其無關
    """
    if not measures:
        raise ArgumentError("至少需要一個測度")
    if len({mu.hom_dim for mu in measures}) > 1:
        raise DataError("測度的同調維度不一致")

    size = len(measures)
    upper = [(i, j) for i in range(size) for j in range(i + 1, size)]
    values = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_ot_value)(measures[i], measures[j], p, q) for i, j in upper)

    matrix = np.zeros((size, size))
    for (i, j), value in zip(upper, values):
        matrix[i, j] = matrix[j, i] = value
    logger.info(f"成對 OT 距離矩陣完成: {size}×{size}")
    return matrix


# ------ 點雲 ------


def _edge_cover(costs: np.ndarray) -> Tuple[float, List[Tuple[int, int]]]:
    """
    最小成本邊覆蓋

    c'(x, y) = c(x, y) − min_y c(x,·) − min_x c(·,y)；對 min(c', 0) 做指派，
    選中的負邊保留，未被覆蓋的列與行各自接回最便宜的邊。
    """
    row_min = costs.min(axis=1)
    col_min = costs.min(axis=0)
    reduced = np.minimum(costs - row_min[:, None] - col_min[None, :], 0.0)
    rows, cols = linear_sum_assignment(reduced)

    chosen = set()
    covered_rows, covered_cols = set(), set()
    for r, c in zip(rows.tolist(), cols.tolist()):
        if reduced[r, c] < 0:
            chosen.add((r, c))
            covered_rows.add(r)
            covered_cols.add(c)
    for r in range(costs.shape[0]):
        if r not in covered_rows:
            chosen.add((r, int(costs[r].argmin())))
    for c in range(costs.shape[1]):
        if c not in covered_cols:
            chosen.add((int(costs[:, c].argmin()), c))

    pairs = sorted(chosen)
    return float(sum(costs[r, c] for r, c in pairs)), pairs


def p_hausdorff(X, Y, p: float = 1.0, metric: Optional[FiniteMetricSpace] = None) -> Tuple[float, List[Tuple[int, int]]]:
    """
    p-Hausdorff 距離：所有對應關係中 (Σ ‖x − y‖₂^p)^{1/p} 的最小值

    Args:
        X, Y: 點雲；給定 metric 時為該度量空間中的索引串列
        p: 有限指數 ≥ 1
        metric: 有限度量空間，使用其矩陣項作為成本

    Returns:
        (distance, correspondence): 對應關係為 (X 索引, Y 索引) 串列
    """
    p = require_finite_exponent(p)
    if metric is not None:
        rows = np.asarray(X, dtype=np.intp)
        cols = np.asarray(Y, dtype=np.intp)
        if rows.size == 0 or cols.size == 0:
            raise ArgumentError("兩個點集都必須非空")
        base = metric.dist[np.ix_(rows, cols)]
    else:
        A = X.points if isinstance(X, PointCloud) else np.atleast_2d(np.asarray(X, dtype=np.float64))
        B = Y.points if isinstance(Y, PointCloud) else np.atleast_2d(np.asarray(Y, dtype=np.float64))
        if A.shape[0] == 0 or B.shape[0] == 0:
            raise ArgumentError("兩個點集都必須非空")
        if A.shape[1] != B.shape[1]:
            raise ArgumentError(f"維度不一致: {A.shape[1]} 與 {B.shape[1]}")
        base = cdist(A, B)

    cost, pairs = _edge_cover(base**p)
    return cost**(1.0 / p), pairs
