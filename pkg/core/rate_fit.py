# core/rate_fit.py
"""
持續同調近似器 - 收斂速率擬合
以 a0 + a1·n^{−c} 擬合損失曲線

功能：
1. 固定指數：對迴歸量 n^{−c} 做線性最小平方
2. 自由指數：在 c ∈ [0.05, 3] 以黃金分割搜尋最小化內層殘差平方和
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from data.result_data import LossCurve, RateFit
from utils.errors import ArgumentError

logger = logging.getLogger("持續同調近似器.RateFit")

EXPONENT_RANGE = (0.05, 3.0)
_COARSE_STEPS = 60


def _linear_fit(ns: np.ndarray, losses: np.ndarray, c: float) -> Tuple[float, float, float]:
    """固定 c 時的 (a0, a1, sse)"""
    design = np.column_stack([np.ones_like(ns), ns**(-c)])
    coef, _, _, _ = np.linalg.lstsq(design, losses, rcond=None)
    residual = losses - design @ coef
    return float(coef[0]), float(coef[1]), float(residual @ residual)


def _bracket(objective, low: float, high: float) -> Optional[Tuple[float, float, float]]:
    """粗網格找出最小值所在的三點括號，找不到嚴格括號時為 None"""
    grid = np.linspace(low, high, _COARSE_STEPS + 1)
    values = [objective(c) for c in grid]
    best = int(np.argmin(values))
    if best == 0 or best == len(grid) - 1:
        return None
    if not (values[best] < values[best - 1] and values[best] < values[best + 1]):
        return None
    return grid[best - 1], grid[best], grid[best + 1]


def fit_rate(curve: LossCurve, c: Optional[float] = None) -> RateFit:
    """
    擬合 loss(n) ≈ a0 + a1·n^{−c}

    Args:
        curve: 損失曲線
        c: 給定時為固定指數模式，None 為自由指數模式

    Returns:
        RateFit: 係數、指數與殘差平方和

    Raises:
        ArgumentError: 固定模式少於 3 列，或自由模式少於 4 列
    """
    ns = np.asarray(curve.ns, dtype=np.float64)
    losses = np.asarray(curve.losses, dtype=np.float64)

    if c is not None:
        if ns.size < 3:
            raise ArgumentError(f"固定指數擬合至少需要 3 列，收到 {ns.size}")
        if c <= 0:
            raise ArgumentError(f"指數 c 必須為正，收到 {c}")
        a0, a1, sse = _linear_fit(ns, losses, float(c))
        return RateFit(a0, a1, float(c), sse, "fixed")

    if ns.size < 4:
        raise ArgumentError(f"自由指數擬合至少需要 4 列，收到 {ns.size}")

    def objective(exponent: float) -> float:
        return _linear_fit(ns, losses, exponent)[2]

    low, high = EXPONENT_RANGE
    bracket = _bracket(objective, low, high)
    if bracket is not None:
        result = minimize_scalar(objective, bracket=bracket, method="golden", options={"xtol": 1e-10})
    else:
        # 最小值落在端點附近
        result = minimize_scalar(objective, bounds=EXPONENT_RANGE, method="bounded", options={"xatol": 1e-10})
    exponent = float(np.clip(result.x, low, high))

    a0, a1, sse = _linear_fit(ns, losses, exponent)
    logger.info(f"自由指數擬合: c={exponent:.6f}, a0={a0:.6g}, a1={a1:.6g}, SSE={sse:.3g}")
    return RateFit(a0, a1, exponent, sse, "free")
