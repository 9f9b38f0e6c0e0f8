#  controller/analysis_controller.py
"""
持續同調近似器 - 分析控制器
協調子抽樣、持續同調與集中趨勢估計

功能：
1. approximate_ph：B 次子抽樣的持續圖、平均持續測度，以及可選的弗雷歇平均與量化
2. export_ot_matrix：多個資料集的平均持續測度之成對 OT 距離矩陣
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from core.means import frechet_mean, mean_measure, quantize
from core.pointcloud import Data, Seed, derive_seed, restrict, subsample
from core.transport import pairwise_ot_matrix
from core.vr_persistence import vr_diagrams
from data.input_data import ApproximationOptions
from data.models import PersistenceDiagram
from data.result_data import ApproximationResult
from utils.errors import ArgumentError
from utils.logging import log_function_call
from utils.validators import require_positive_int

logger = logging.getLogger("持續同調近似器.AnalysisController")


def subsample_seed(seed: Seed, index: int) -> np.random.SeedSequence:
    """第 index 個子樣本的亂數流，只由主種子與索引決定"""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + (int(index),))
    return derive_seed(seed, index)


def subsample_diagram(data: Data, n: int, seed: np.random.SeedSequence, opts: ApproximationOptions) -> PersistenceDiagram:
    """單一子樣本在 opts.hom_dim 的持續圖"""
    indices = subsample(data, n, seed, opts.with_replacement)
    diagrams = vr_diagrams(restrict(data, indices), opts.hom_dim, opts.max_scale, opts.min_persistence)
    return diagrams[opts.hom_dim]


@log_function_call()
def approximate_ph(data: Data, n: int, B: int, seed: Seed,
                   opts: Optional[ApproximationOptions] = None) -> ApproximationResult:
    """
    以 B 個大小為 n 的子樣本近似整個資料集的持續同調

    第 i 個子樣本使用由 (seed, i) 衍生的亂數流，結果依提交順序收集，
    因此與平行工作數無關。

    Args:
        data: 點雲或度量空間
        n: 子樣本大小
        B: 子樣本數
        seed: 主種子或 SeedSequence
        opts: 同調維度、尺度、持續度門檻與可選的弗雷歇 / 量化設定

    Returns:
        ApproximationResult: 平均持續測度、B 張持續圖與可選結果
    """
    opts = opts or ApproximationOptions()
    n = require_positive_int(n, "n")
    B = require_positive_int(B, "B")
    if opts.hom_dim < 0:
        raise ArgumentError(f"hom_dim 必須 ≥ 0，收到 {opts.hom_dim}")

    diagrams: List[PersistenceDiagram] = Parallel(n_jobs=opts.n_jobs, prefer="threads")(
        delayed(subsample_diagram)(data, n, subsample_seed(seed, i), opts) for i in range(B))
    result = ApproximationResult(mean_measure(diagrams), diagrams)

    if opts.frechet is not None:
        result.frechet = frechet_mean(diagrams, opts.frechet)
    if opts.quantization is not None:
        if len(result.mean) == 0:
            logger.warning("平均持續測度為空，略過量化")
        else:
            result.quantized = quantize(result.mean, opts.quantization)

    logger.info(f"近似完成: n={n}, B={B}, 平均測度 {len(result.mean)} 個原子, 總質量 {result.mean.total_mass:.6g}")
    return result


def resolve_subsample_size(data: Data, n: Optional[int] = None, fraction: Optional[float] = None) -> int:
    """子樣本大小可直接給定，或以資料點數的比例給定（至少 1）"""
    if n is not None:
        return require_positive_int(n, "n")
    if fraction is None or not 0 < fraction <= 1:
        raise ArgumentError(f"需要 n 或 (0, 1] 內的 fraction，收到 n={n}, fraction={fraction}")
    return max(1, math.ceil(fraction * len(data) - 1e-9))


@log_function_call()
def export_ot_matrix(datasets: Sequence[Data], B: int, seed: Seed,
                     opts: Optional[ApproximationOptions] = None,
                     p: float = 2.0, q: Optional[float] = None,
                     n: Optional[int] = None, fraction: Optional[float] = None) -> np.ndarray:
    """
    每個資料集各自近似出平均持續測度，再計算成對 OT_{p,q} 距離矩陣

    所有資料集使用相同種子，相同資料得到相同測度。

    Args:
        datasets: 至少兩個資料集
        B: 每個資料集的子樣本數
        seed: 主種子
        opts: 近似選項
        p, q: 距離指數與範數
        n: 子樣本大小；未給時使用 fraction
        fraction: 子樣本占資料點數的比例

    Returns:
        np.ndarray: 對稱、對角線為 0 的距離矩陣
    """
    if len(datasets) < 2:
        raise ArgumentError(f"至少需要兩個資料集，收到 {len(datasets)}")
    opts = opts or ApproximationOptions()

    measures = []
    for index, data in enumerate(datasets):
        size = resolve_subsample_size(data, n, fraction)
        measures.append(approximate_ph(data, size, B, seed, opts).mean)
        logger.debug(f"資料集 {index}: n={size}, {len(measures[-1])} 個原子")

    return pairwise_ot_matrix(measures, p, q, n_jobs=opts.n_jobs)
