# ui/plots.py
"""
持續同調近似器 - 圖表
以 matplotlib（Agg 後端）輸出獨立的 SVG 圖

功能：
1. 損失曲線、擬合模型與理論界限疊加
2. 持續測度散佈圖（點大小依質量），可疊加持續圖
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from data.models import PersistenceDiagram, PersistenceMeasure  # noqa: E402
from data.result_data import LossCurve, RateFit  # noqa: E402

logger = logging.getLogger("持續同調近似器.Plots")


def plot_loss_curve(curve: LossCurve, path: Path, fit: Optional[RateFit] = None,
                    bound: Optional[Sequence[Tuple[float, float]]] = None, bound_label: str = "bound") -> Path:
    """
    損失曲線 SVG

    Args:
        curve: 損失曲線，誤差棒為重複間標準差
        path: 輸出路徑
        fit: 擬合結果，畫成平滑曲線
        bound: (x, 界限) 串列，使用第二個 y 軸（常數未校準，只比較形狀）
        bound_label: 界限圖例
    """
    ns = np.asarray(curve.ns, dtype=np.float64)
    losses = np.asarray(curve.losses, dtype=np.float64)
    stds = np.asarray([row.loss_std for row in curve.rows], dtype=np.float64)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(ns, losses, yerr=stds, fmt="o", capsize=3, label=f"{curve.label} loss")
    if fit is not None and ns.size:
        grid = np.linspace(ns.min(), ns.max(), 200)
        ax.plot(grid, fit.predict(grid), "-", label=f"{fit.a0:.3g} + {fit.a1:.3g}·n^-{fit.c:.3f}")
    ax.set_xlabel("n")
    ax.set_ylabel("loss")

    if bound:
        bx, by = zip(*bound)
        twin = ax.twinx()
        twin.plot(bx, by, "--", color="gray", label=bound_label)
        twin.set_ylabel(bound_label)
        twin.legend(loc="upper center")

    ax.legend(loc="upper right")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"已輸出損失曲線圖: {path}")
    return path


def plot_measure(measure: PersistenceMeasure, path: Path, overlay: Optional[PersistenceDiagram] = None) -> Path:
    """持續測度散佈圖，點面積與質量成正比；overlay 以叉號標示"""
    fig, ax = plt.subplots(figsize=(5, 5))
    upper = 1.0
    if len(measure):
        sizes = 200 * measure.masses / measure.masses.max()
        ax.scatter(measure.points[:, 0], measure.points[:, 1], s=sizes, alpha=0.5, label=f"H{measure.hom_dim} measure")
        upper = float(measure.points.max())
    if overlay is not None and overlay.points:
        pts = overlay.expanded()
        ax.scatter(pts[:, 0], pts[:, 1], marker="x", color="red", label="diagram")
        upper = max(upper, float(pts.max()))

    ax.plot([0, upper], [0, upper], color="black", linewidth=0.8)
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"已輸出持續測度圖: {path}")
    return path
