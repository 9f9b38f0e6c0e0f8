#  controller/experiment_controller.py
"""
持續同調近似器 - 實驗控制器
驗證子抽樣近似收斂速率的實驗

功能：
1. 速率實驗：各 n 的重複子抽樣損失，逐格寫入可續跑的 CSV
2. 變異速率檢查：固定 n，損失隨 B 的衰減（以最大 B 的平均為代理）
3. 平均比較：弗雷歇平均與平均持續測度對參考圖的損失，可加入雜訊
4. 偏差–變異代理報告
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from controller.analysis_controller import approximate_ph
from core.means import finite_part, frechet_mean, mean_measure
from core.diagram_measure import diagram_to_measure
from core.pointcloud import Data, Seed, derive_seed, perturb
from core.rate_fit import fit_rate
from core.transport import ot_distance, wasserstein
from data.file_manager import FileManager
from data.input_data import ApproximationOptions, ExperimentConfig, FrechetConfig
from data.models import PersistenceDiagram, PersistenceMeasure
from data.result_data import CompareRow, LossCurve, LossRow
from utils.errors import ArgumentError, ConfigError
from utils.logging import log_function_call
from utils.validators import require_finite_exponent, require_increasing, require_positive_int

logger = logging.getLogger("持續同調近似器.ExperimentController")

BIAS_VARIANCE_SLACK = 1e-6


def _loss(mean: PersistenceMeasure, target: PersistenceMeasure, p: float, q: Optional[float], power: bool) -> float:
    """power 時為 OT_p^p，否則為 OT_p"""
    distance, plan = ot_distance(mean, target, p, q)
    return plan.cost if power else distance


def _options(cfg: ExperimentConfig, n_jobs: int) -> ApproximationOptions:
    return ApproximationOptions(hom_dim=cfg.hom_dim,
                                max_scale=cfg.max_scale,
                                min_persistence=cfg.min_persistence,
                                with_replacement=cfg.with_replacement,
                                n_jobs=n_jobs)


@log_function_call()
def rate_experiment(cfg: ExperimentConfig,
                    data: Data,
                    reference: PersistenceDiagram,
                    csv_path: Optional[str] = None,
                    n_jobs: int = 1,
                    file_manager: Optional[FileManager] = None) -> LossCurve:
    """
    對 n 網格執行重複子抽樣並計算 OT_p^p(D̄, D[𝒳])

    格子 (n, repeat) 的亂數流為 derive_seed(master_seed, n, repeat)。給定 csv_path 時，
    每完成一格就附加一列；重跑時略過已完成的格子，設定雜湊不同則拒絕續跑。

    Args:
        cfg: 實驗設定
        data: 整個資料集
        reference: 參考持續圖 D[𝒳]
        csv_path: 可續跑的實驗 CSV
        n_jobs: 子抽樣的平行工作數，不影響結果
        file_manager: 檔案管理器

    Returns:
        LossCurve: 每個 n 一列（重複間的平均與標準差）
    """
    N = len(data)
    if not cfg.with_replacement and cfg.n_grid[-1] > N:
        raise ConfigError(f"無放回抽樣需要所有 n ≤ N={N}，網格最大值為 {cfg.n_grid[-1]}")
    if reference.homology_dim != cfg.hom_dim:
        raise ConfigError(f"參考圖維度 {reference.homology_dim} 與實驗維度 {cfg.hom_dim} 不同")

    target = diagram_to_measure(reference)
    opts = _options(cfg, n_jobs)
    file_manager = file_manager or FileManager()
    completed = file_manager.open_experiment_log(csv_path, cfg.config_hash()) if csv_path else {}

    rows = []
    for n in cfg.n_grid:
        B = cfg.subsample_count(n)
        losses = []
        for repeat in range(cfg.repeats):
            if (n, repeat) in completed:
                losses.append(completed[(n, repeat)][1])
                continue
            result = approximate_ph(data, n, B, derive_seed(cfg.master_seed, n, repeat), opts)
            loss = _loss(result.mean, target, cfg.p, cfg.q, cfg.loss_power)
            losses.append(loss)
            if csv_path:
                file_manager.append_experiment_row(csv_path, n, repeat, B, loss)
        rows.append(LossRow(n, B, float(np.mean(losses)), float(np.std(losses))))
        logger.info(f"n={n}, B={B}: 平均損失 {rows[-1].empirical_loss:.6g} ± {rows[-1].loss_std:.3g}")

    return LossCurve(rows)


@log_function_call()
def variance_rate_check(data: Data, n: int, B_grid: Sequence[int], seed: Seed,
                        p: float = 2.0, q: Optional[float] = None,
                        opts: Optional[ApproximationOptions] = None) -> Dict[str, Any]:
    """
    固定 n 時 OT_p^p(D̄_B, 代理) 隨 B 的變化

    母體平均測度無法計算，以最大 B 的平均測度為代理；較小的 B 使用同一串子樣本的前綴，
    最大 B 一列的損失依構造為 0。擬合不含代理列，至少需要 4 列。

    Returns:
        Dict: curve（標記 "proxy"）、fit（可能為 None）、reference_exponent 0.5
    """
    B_grid = [require_positive_int(B, "B") for B in require_increasing(B_grid, "B_grid")]
    p = require_finite_exponent(p)
    result = approximate_ph(data, n, B_grid[-1], seed, opts)
    proxy = result.mean

    rows = []
    for B in B_grid:
        prefix_mean = proxy if B == B_grid[-1] else mean_measure(result.diagrams[:B])
        rows.append(LossRow(n, B, _loss(prefix_mean, proxy, p, q, True), 0.0))
    curve = LossCurve(rows, label="proxy")

    fit = None
    fit_rows = [LossRow(row.B, row.B, row.empirical_loss, 0.0) for row in rows[:-1]]
    if len(fit_rows) >= 4:
        fit = fit_rate(LossCurve(fit_rows, label="proxy"))
        logger.info(f"變異衰減指數 {fit.c:.4f}（理論 0.5）")
    else:
        logger.info("B 網格不足 5 點，略過衰減擬合")
    return {"curve": curve, "fit": fit, "reference_exponent": 0.5}


@log_function_call()
def compare_means(data: Data, n_grid: Sequence[int], B: int, seed: int,
                  reference: PersistenceDiagram,
                  sigma: float = 0.0,
                  opts: Optional[ApproximationOptions] = None,
                  frechet: Optional[FrechetConfig] = None) -> List[CompareRow]:
    """
    對每個 n 比較弗雷歇平均的 W₂² 損失與平均持續測度的 OT₂² 損失

    sigma > 0 時資料先加入高斯雜訊（亂數流 derive_seed(seed, 0)），參考圖不變；
    各 n 的子抽樣使用 derive_seed(seed, n)。本質類不列入比較。
    """
    n_grid = require_increasing(n_grid, "n_grid")
    opts = opts or ApproximationOptions()
    if sigma > 0:
        data = perturb(data, sigma, derive_seed(seed, 0))

    target_diagram = finite_part(reference)
    target = diagram_to_measure(reference)
    rows = []
    for n in n_grid:
        result = approximate_ph(data, n, B, derive_seed(seed, n), opts)
        fr = frechet_mean(result.diagrams, frechet)
        frechet_loss = wasserstein(fr.diagram, target_diagram, 2.0, 2.0)[1].cost
        measure_loss = ot_distance(result.mean, target, 2.0, 2.0)[1].cost
        rows.append(CompareRow(int(n), int(B), float(sigma), frechet_loss, measure_loss))
        logger.info(f"n={n}: 弗雷歇 W₂²={frechet_loss:.6g}, 平均測度 OT₂²={measure_loss:.6g}")
    return rows


@log_function_call()
def bias_variance_check(data: Data, n: int, B: int, proxy_B: int, seed: Seed,
                        reference: PersistenceDiagram,
                        p: float = 2.0, q: Optional[float] = None,
                        opts: Optional[ApproximationOptions] = None) -> Dict[str, Any]:
    """
    代理層級的偏差–變異檢查

    proxy_B 個子樣本的平均作為母體平均的代理，前 B 個子樣本的平均為 D̄。
    loss = OT_p^p(D̄, D[𝒳])，variance = OT_p^p(D̄, 代理)，bias = OT_p^p(代理, D[𝒳])，
    並檢查 loss ≤ 2^{p−1}(variance + bias) + 1e-6。
    """
    B = require_positive_int(B, "B")
    if proxy_B < B:
        raise ArgumentError(f"proxy_B 必須 ≥ B，收到 proxy_B={proxy_B}, B={B}")
    p = require_finite_exponent(p)

    result = approximate_ph(data, n, proxy_B, seed, opts)
    proxy = result.mean
    mean = mean_measure(result.diagrams[:B])
    target = diagram_to_measure(reference)

    loss = _loss(mean, target, p, q, True)
    variance = _loss(mean, proxy, p, q, True)
    bias = _loss(proxy, target, p, q, True)
    bound = 2**(p - 1) * (variance + bias)
    report = {
        "n": n,
        "B": B,
        "proxy_B": proxy_B,
        "loss": loss,
        "variance_proxy": variance,
        "bias_proxy": bias,
        "bound": bound,
        "holds": bool(loss <= bound + BIAS_VARIANCE_SLACK),
        "label": "proxy"
    }
    logger.info(f"偏差–變異: loss={loss:.6g}, 界限={bound:.6g}, {'成立' if report['holds'] else '不成立'}")
    return report
