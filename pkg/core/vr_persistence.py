# core/vr_persistence.py
"""
持續同調近似器 - Vietoris–Rips 持續同調
建立 VR 過濾並以 ℤ/2 邊界矩陣化簡計算持續圖

功能：
1. 以 (過濾值, 維度, 字典序) 全序列出 VR 單形
2. 0 維以聯集–尋找（長者規則）配對
3. 高維以自上而下的欄化簡加上清除（twist）最佳化
4. 未最佳化的教科書化簡作為對照
5. 針對資料的低維快速路徑：上邊界（餘同調）化簡與顯然配對
6. 依持續度過濾與本質類截斷
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from core.pointcloud import Data, as_metric_space
from data.models import FilteredSimplex, FiniteMetricSpace, PersistenceDiagram
from utils.errors import ArgumentError, ContractError
from utils.logging import log_function_call

logger = logging.getLogger("持續同調近似器.VRPersistence")

# 顯然配對偵測時每批處理的矩陣元素上限
_CHUNK_ELEMENTS = 1 << 20


def enclosing_radius(dist: np.ndarray) -> float:
    """min_i max_j dist[i][j]；超過此尺度 VR 複形為錐，同調平凡"""
    if dist.shape[0] <= 1:
        return 0.0
    return float(dist.max(axis=1).min())


def _resolve_scale(dist: np.ndarray, max_scale: Optional[float]) -> float:
    if not np.all(np.isfinite(dist)):
        raise ArgumentError("距離矩陣包含非有限值")
    if max_scale is None:
        return enclosing_radius(dist)
    if not max_scale > 0:
        raise ArgumentError(f"max_scale 必須為正或 +∞，收到 {max_scale}")
    return float(max_scale)


# ------ 過濾建構 ------


def build_vr_filtration(M: Data, max_dim: int, max_scale: Optional[float] = None) -> List[FilteredSimplex]:
    """
    列出維度 ≤ max_dim + 1 且直徑 ≤ max_scale 的所有單形

    Args:
        M: 度量空間（點雲會先轉為距離矩陣）
        max_dim: 最高同調維度
        max_scale: 最大尺度，None 代表包覆半徑，可為 +∞

    Returns:
        list[FilteredSimplex]: 依 (過濾值, 維度, 字典序) 排序
    """
    if max_dim < 0:
        raise ArgumentError(f"max_dim 必須 ≥ 0，收到 {max_dim}")
    dist = as_metric_space(M).dist
    scale = _resolve_scale(dist, max_scale)

    N = dist.shape[0]
    simplices = [FilteredSimplex((i, ), 0.0) for i in range(N)]

    adjacency = dist <= scale
    np.fill_diagonal(adjacency, False)
    order = np.arange(N)

    # 逐層擴張團，新頂點大於目前最後一個頂點
    layer: List[Tuple[Tuple[int, ...], float]] = [((i, ), 0.0) for i in range(N)]
    for _ in range(max_dim + 1):
        next_layer = []
        for vertices, value in layer:
            candidates = adjacency[vertices[-1]] & (order > vertices[-1])
            for v in vertices[:-1]:
                candidates &= adjacency[v]
            extension = np.flatnonzero(candidates)
            if extension.size == 0:
                continue
            diameters = np.maximum(value, dist[np.ix_(list(vertices), extension)].max(axis=0))
            for w, diameter in zip(extension.tolist(), diameters.tolist()):
                next_layer.append((vertices + (w, ), diameter))
        if not next_layer:
            break
        simplices.extend(FilteredSimplex(v, d) for v, d in next_layer)
        layer = next_layer

    simplices.sort(key=FilteredSimplex.sort_key)
    logger.debug(f"VR 過濾: {N} 點, {len(simplices)} 單形, 尺度 {scale:.6g}")
    return simplices


# ------ 邊界矩陣化簡 ------


def _index_filtration(filtration: Sequence[FilteredSimplex]) -> Dict[Tuple[int, ...], int]:
    """檢查排序與面封閉性並回傳頂點組到位置的映射"""
    index: Dict[Tuple[int, ...], int] = {}
    previous = None
    for position, simplex in enumerate(filtration):
        key = simplex.sort_key()
        if previous is not None and key <= previous:
            raise ContractError(f"過濾未依 (值, 維度, 字典序) 嚴格排序: 位置 {position}")
        previous = key
        vertices = simplex.vertices
        if list(vertices) != sorted(set(vertices)):
            raise ContractError(f"單形頂點必須嚴格遞增: {vertices}")
        if len(vertices) > 1:
            for drop in range(len(vertices)):
                face = vertices[:drop] + vertices[drop + 1:]
                if face not in index:
                    raise ContractError(f"單形 {vertices} 的面 {face} 未在其之前出現")
        index[vertices] = position
    return index


def _boundary(vertices: Tuple[int, ...], index: Dict[Tuple[int, ...], int]) -> Set[int]:
    if len(vertices) == 1:
        return set()
    return {index[vertices[:i] + vertices[i + 1:]] for i in range(len(vertices))}


def _diagrams_from_pairs(filtration: Sequence[FilteredSimplex], pairs: Iterable[Tuple[int, int]],
                         essential: Iterable[int], max_hom_dim: int) -> List[PersistenceDiagram]:
    finite: List[List[Tuple[float, float]]] = [[] for _ in range(max_hom_dim + 1)]
    births: List[List[float]] = [[] for _ in range(max_hom_dim + 1)]
    for birth_idx, death_idx in pairs:
        dim = filtration[birth_idx].dim
        birth = filtration[birth_idx].filtration_value
        death = filtration[death_idx].filtration_value
        if dim <= max_hom_dim and death > birth:
            finite[dim].append((birth, death))
    for idx in essential:
        dim = filtration[idx].dim
        if dim <= max_hom_dim:
            births[dim].append(filtration[idx].filtration_value)
    return [PersistenceDiagram.from_pairs(k, finite[k], births[k]) for k in range(max_hom_dim + 1)]


class _UnionFind:
    """以過濾位置為根序的聯集–尋找，較早出生的根存活"""

    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> Optional[int]:
        """合併兩個分量，回傳被殺死的較年輕根；同一分量時回傳 None"""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        elder, younger = (ra, rb) if ra < rb else (rb, ra)
        self.parent[younger] = elder
        return younger


@log_function_call()
def compute_persistence(filtration: Sequence[FilteredSimplex], max_hom_dim: int = 1) -> List[PersistenceDiagram]:
    """
    計算維度 0..max_hom_dim 的持續圖

    0 維以聯集–尋找處理；維度 ≥ 1 的配對由 (k+1)-單形欄自上而下化簡，
    成為某欄 low 的 k-單形直接清除（其欄必化簡為零）。零持續度配對捨棄。

    Args:
        filtration: 已排序且面封閉的過濾
        max_hom_dim: 最高同調維度

    Returns:
        list[PersistenceDiagram]: 每個維度一張圖
    """
    if max_hom_dim < 0:
        raise ArgumentError(f"max_hom_dim 必須 ≥ 0，收到 {max_hom_dim}")
    index = _index_filtration(filtration)

    by_dim: List[List[int]] = [[] for _ in range(max_hom_dim + 2)]
    for position, simplex in enumerate(filtration):
        if simplex.dim <= max_hom_dim + 1:
            by_dim[simplex.dim].append(position)

    pairs: List[Tuple[int, int]] = []
    paired: Set[int] = set()
    positive: Set[int] = set(by_dim[0])

    cleared: Set[int] = set()
    for dim in range(max_hom_dim + 1, 1, -1):
        pivots: Dict[int, Set[int]] = {}
        next_cleared: Set[int] = set()
        for column_idx in by_dim[dim]:
            if column_idx in cleared:
                continue
            column = _boundary(filtration[column_idx].vertices, index)
            low = max(column) if column else None
            while low is not None and low in pivots:
                column ^= pivots[low]
                low = max(column) if column else None
            if low is None:
                positive.add(column_idx)
                continue
            pivots[low] = column
            pairs.append((low, column_idx))
            paired.update((low, column_idx))
            next_cleared.add(low)
        cleared = next_cleared

    components = _UnionFind()
    for edge in by_dim[1]:
        u, v = filtration[edge].vertices
        killed = components.union(index[(u, )], index[(v, )])
        if killed is None:
            positive.add(edge)
        else:
            pairs.append((killed, edge))
            paired.update((killed, edge))

    essential = [idx for idx in positive if idx not in paired]
    return _diagrams_from_pairs(filtration, pairs, essential, max_hom_dim)


def naive_reduction_oracle(filtration: Sequence[FilteredSimplex], max_hom_dim: int = 1) -> List[PersistenceDiagram]:
    """教科書式由左至右的完整欄化簡，無任何最佳化，供小型輸入對照"""
    if max_hom_dim < 0:
        raise ArgumentError(f"max_hom_dim 必須 ≥ 0，收到 {max_hom_dim}")
    index = _index_filtration(filtration)

    reduced: Dict[int, Set[int]] = {}
    pivot_owner: Dict[int, int] = {}
    pairs = []
    zero_columns = []
    for position, simplex in enumerate(filtration):
        if simplex.dim > max_hom_dim + 1:
            continue
        column = _boundary(simplex.vertices, index)
        while column and max(column) in pivot_owner:
            column ^= reduced[pivot_owner[max(column)]]
        reduced[position] = column
        if column:
            pivot_owner[max(column)] = position
            pairs.append((max(column), position))
        else:
            zero_columns.append(position)

    births = {low for low, _ in pairs}
    essential = [idx for idx in zero_columns if idx not in births]
    return _diagrams_from_pairs(filtration, pairs, essential, max_hom_dim)


# ------ 低維快速路徑 ------


def _low_dim_diagrams(dist: np.ndarray, max_hom_dim: int, scale: float) -> List[PersistenceDiagram]:
    """
    直接由距離矩陣計算 H0 與 H1，不列出三角形

    H0 以聯集–尋找；H1 以邊的上邊界欄（依過濾逆序）化簡，
    H0 死亡邊清除，最小上鄰面與之構成顯然配對的邊不需化簡。
    配對與邊界矩陣化簡在同一全序下完全相同。
    """
    N = dist.shape[0]
    values, inverse = np.unique(dist, return_inverse=True)
    rank = inverse.reshape(N, N).astype(np.int64)

    iu, ju = np.triu_indices(N, k=1)
    keep = dist[iu, ju] <= scale
    iu, ju = iu[keep], ju[keep]
    edge_rank = rank[iu, ju]
    order = np.lexsort((ju, iu, edge_rank))
    iu, ju, edge_rank = iu[order], ju[order], edge_rank[order]
    E = iu.size

    components = _UnionFind()
    h0_deaths = []
    negative = np.zeros(E, dtype=bool)
    merges = 0
    for e, (u, v) in enumerate(zip(iu.tolist(), ju.tolist())):
        if components.union(u, v) is None:
            continue
        negative[e] = True
        h0_deaths.append(float(values[edge_rank[e]]))
        merges += 1
        if merges == N - 1:
            break
    diagrams = [PersistenceDiagram.from_pairs(0, [(0.0, d) for d in h0_deaths if d > 0], [0.0] * (N - merges))]
    if max_hom_dim == 0:
        return diagrams

    adjacency = dist <= scale
    np.fill_diagonal(adjacency, False)
    sentinel = np.iinfo(np.int64).max
    N2, N3 = N * N, N * N * N

    candidates = np.flatnonzero(~negative)
    apparent_key: Dict[int, int] = {}
    chunk = max(1, _CHUNK_ELEMENTS // max(N, 1))
    for start in range(0, candidates.size, chunk):
        block = candidates[start:start + chunk]
        u, v, r = iu[block], ju[block], edge_rank[block]
        valid = adjacency[u] & adjacency[v]
        tri = np.maximum(np.maximum(rank[u], rank[v]), r[:, None])
        tri[~valid] = sentinel
        w = tri.argmin(axis=1)
        t = tri[np.arange(block.size), w]
        # e 為三角形 {u,v,w} 中過濾序最後的邊
        is_last = (((rank[u, w] < r) | (w < v)) & ((rank[v, w] < r) | (w < u)))
        apparent = (t != sentinel) & (t == r) & is_last
        for e, a, b, c in zip(block[apparent].tolist(), u[apparent].tolist(), v[apparent].tolist(),
                              w[apparent].tolist()):
            a, b, c = sorted((a, b, c))
            apparent_key[e] = int(edge_rank[e]) * N3 + a * N2 + b * N + c

    cache: Dict[int, Set[int]] = {}

    def coboundary(e: int) -> Set[int]:
        column = cache.get(e)
        if column is None:
            u, v = int(iu[e]), int(ju[e])
            ws = np.flatnonzero(adjacency[u] & adjacency[v])
            tri = np.maximum(np.maximum(rank[u, ws], rank[v, ws]), edge_rank[e])
            corners = np.sort(np.vstack([np.full(ws.size, u), np.full(ws.size, v), ws]), axis=0)
            keys = tri * N3 + corners[0] * N2 + corners[1] * N + corners[2]
            column = set(keys.tolist())
            cache[e] = column
        return column

    pivots: Dict[int, Union[int, Set[int]]] = {}
    pairs: List[Tuple[float, float]] = []
    essential: List[float] = []
    for e in candidates[::-1].tolist():
        key = apparent_key.get(e)
        if key is not None:
            pivots[key] = e
            continue
        column = set(coboundary(e))
        while column:
            low = min(column)
            owner = pivots.get(low)
            if owner is None:
                break
            column ^= coboundary(owner) if isinstance(owner, int) else owner
        birth = float(values[edge_rank[e]])
        if not column:
            essential.append(birth)
            continue
        low = min(column)
        pivots[low] = column
        death = float(values[low // N3])
        if death > birth:
            pairs.append((birth, death))

    logger.debug(f"H1 快速路徑: {E} 邊, {len(apparent_key)} 顯然配對, {len(pairs)} 有限點")
    diagrams.append(PersistenceDiagram.from_pairs(1, pairs, essential))
    return diagrams


# ------ 圖的後處理 ------


def filter_by_persistence(D: PersistenceDiagram, tau: float) -> PersistenceDiagram:
    """保留 death − birth ≥ tau 的點與所有本質類"""
    if not tau >= 0:
        raise ArgumentError(f"tau 必須 ≥ 0，收到 {tau}")
    if tau == 0:
        return D
    kept = [(b, d, m) for b, d, m in D.points if d - b >= tau]
    return PersistenceDiagram(D.homology_dim, kept, list(D.essential))


def truncate_essential(D: PersistenceDiagram, death: float) -> PersistenceDiagram:
    """把本質類改為在 death 死亡的有限點；birth ≥ death 的本質類捨去"""
    points = list(D.points) + [(b, death, 1) for b in D.essential if b < death]
    return PersistenceDiagram(D.homology_dim, points, [])


@log_function_call()
def vr_diagrams(X: Data,
                max_hom_dim: int = 1,
                max_scale: Optional[float] = None,
                min_persistence: float = 0.0,
                truncate: bool = False) -> List[PersistenceDiagram]:
    """
    由資料直接計算 VR 持續圖

    Args:
        X: 點雲或度量空間
        max_hom_dim: 最高同調維度，≤ 1 時走快速路徑
        max_scale: 最大尺度，None 代表包覆半徑
        min_persistence: 持續度門檻 tau
        truncate: 是否把本質類截斷在最大尺度

    Returns:
        list[PersistenceDiagram]: 維度 0..max_hom_dim
    """
    if max_hom_dim < 0:
        raise ArgumentError(f"max_hom_dim 必須 ≥ 0，收到 {max_hom_dim}")
    dist = as_metric_space(X).dist
    scale = _resolve_scale(dist, max_scale)

    if max_hom_dim <= 1:
        diagrams = _low_dim_diagrams(dist, max_hom_dim, scale)
    else:
        diagrams = compute_persistence(build_vr_filtration(FiniteMetricSpace(dist), max_hom_dim, scale),
                                       max_hom_dim)

    if truncate and math.isfinite(scale):
        diagrams = [truncate_essential(D, scale) for D in diagrams]
    return [filter_by_persistence(D, min_persistence) for D in diagrams]
