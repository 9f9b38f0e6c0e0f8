# core/bounds.py
"""
持續同調近似器 - 理論界限
(a, b, r0) 標準假設下的子抽樣偏差、尾機率與變異界限

功能：
1. 期望 p-Hausdorff 距離的偏差上界（p > b 與 p ≤ b 兩個分支）
2. p-Hausdorff 距離的尾機率上界
3. 平衡變異與偏差的子樣本數 B
4. 變異界限 C/√B 與弗雷歇平均的偏差對應
5. 收斂速率區間判定

常數未經校準，只用於比較形狀與速率。
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from scipy.special import gamma

from data.models import StandardAssumptionParams
from utils.errors import ArgumentError
from utils.validators import require_finite_exponent, require_positive, require_positive_int

logger = logging.getLogger("持續同調近似器.Bounds")


def _beta(params: StandardAssumptionParams, p: float) -> float:
    return p / params.b - 1.0


def _log_ratio(n: int) -> float:
    if n <= 1:
        raise ArgumentError(f"p ≤ b 分支需要 n > 1，收到 n={n}")
    return math.log(n) / n


def critical_radius(params: StandardAssumptionParams, p: float, n: int, N: int) -> float:
    """r_n = (2 N^{1/p} / a^{1/b}) · (log n / n)^{1/b}"""
    return 2 * N**(1.0 / p) / params.a**(1.0 / params.b) * _log_ratio(n)**(1.0 / params.b)


def bias_bound(params: StandardAssumptionParams, p: float, n: int, N: int) -> float:
    """
    E[H_p^p(S_n, 𝒳)] 的上界

    β = p/b − 1。p > b 時為 2^p N r0^p + 2^{p+b} p N Γ(β) / (b a^β) · n^{−β}；
    p ≤ b 時為 2^p N r0^p + p r_n 𝟙{r_n > 2 r0 N^{1/p}} + 2^{p+b} p N / (b a^β) · (log n / n)^{p/b} / (log n)²。

    Args:
        params: 標準假設參數
        p: 有限指數 ≥ 1
        n: 子樣本大小
        N: 資料點數

    Returns:
        float: 偏差上界
    """
    p = require_finite_exponent(p)
    n = require_positive_int(n, "n")
    N = require_positive_int(N, "N")
    a, b, r0 = params.a, params.b, params.r0
    beta = _beta(params, p)
    floor_term = 2**p * N * r0**p

    if p > b:
        return floor_term + 2**(p + b) * p * N * gamma(beta) / (b * a**beta) * n**(-beta)

    ratio = _log_ratio(n)
    r_n = critical_radius(params, p, n, N)
    indicator = 1.0 if r_n > 2 * r0 * N**(1.0 / p) else 0.0
    tail = 2**(p + b) * p * N / (b * a**beta) * ratio**(p / b) / math.log(n)**2
    return floor_term + p * r_n * indicator + tail


def bias_bound_curve(params: StandardAssumptionParams, p: float, ns: Sequence[int], N: int) -> List[Tuple[int, float]]:
    """在 n 網格上計算偏差上界，供圖表疊加"""
    return [(int(n), bias_bound(params, p, int(n), N)) for n in ns]


def hausdorff_tail_bound(params: StandardAssumptionParams, p: float, n: int, N: int, r: float) -> float:
    """
    P(H_p(S_n, 𝒳) > r) 的上界

    (4^b N^{b/p} / (a r^b)) · exp(−a r^b n / (2^b N^{b/p}))，截斷於 [0, 1]。

    Raises:
        ArgumentError: r ≤ 2 r0 N^{1/p}
    """
    p = require_finite_exponent(p)
    n = require_positive_int(n, "n")
    N = require_positive_int(N, "N")
    a, b, r0 = params.a, params.b, params.r0
    if not r > 2 * r0 * N**(1.0 / p):
        raise ArgumentError(f"需要 r > 2·r0·N^(1/p) = {2 * r0 * N**(1.0 / p)}，收到 r={r}")

    scale = N**(b / p)
    value = 4**b * scale / (a * r**b) * math.exp(-a * r**b * n / (2**b * scale))
    return min(1.0, max(0.0, value))


def optimal_subsample_count(n: int, p: float, b: float) -> int:
    """
    平衡變異 O(B^{−1/2}) 與偏差的子樣本數

    p > b 時 B = ⌈n^{2β}⌉，否則 B = ⌈(n / log n)^{2/b}⌉
    """
    n = require_positive_int(n, "n")
    p = require_finite_exponent(p)
    b = require_positive(b, "b")
    if p > b:
        return max(1, math.ceil(n**(2 * (p / b - 1.0)) - 1e-9))
    return max(1, math.ceil((1.0 / _log_ratio(n))**(2.0 / b) - 1e-9))


def variance_bound(B: int, C: float = 1.0) -> float:
    """變異項的形狀 C/√B"""
    B = require_positive_int(B, "B")
    return C / math.sqrt(B)


def frechet_bias_bound(params: StandardAssumptionParams, p: float, n: int, N: int,
                       sigma2: Optional[float] = None) -> Dict[str, Any]:
    """
    弗雷歇平均偏差 2^{p−1} σ² + 2^{p−1} · bias_bound

    σ² 未知時只回傳可計算部分，並標記 "+O(1)"。
    """
    rate_part = 2**(p - 1) * bias_bound(params, p, n, N)
    if sigma2 is None:
        return {"value": rate_part, "offset": "+O(1)"}
    return {"value": 2**(p - 1) * float(sigma2) + rate_part, "offset": None}


def rate_regime(params: StandardAssumptionParams, p: float, n: int) -> Dict[str, Any]:
    """
    判定近似誤差所屬的速率區間

    Returns:
        Dict: regime 名稱、偏差項形狀、偏差指數與對應的最佳 B 規則
    """
    p = require_finite_exponent(p)
    n = require_positive_int(n, "n")
    b = params.b
    if p > b:
        beta = _beta(params, p)
        return {
            "regime": "p>b",
            "bias_term": f"n^-{beta:g}",
            "bias_exponent": beta,
            "log_factor": False,
            "optimal_B": f"n^{2 * beta:g}"
        }

    threshold = (_log_ratio(n) / params.a)**(1.0 / b)
    if params.r0 < threshold:
        return {
            "regime": "p<=b, r0 below (log n / an)^(1/b)",
            "bias_term": f"(log n / n)^{1 / b:g}",
            "bias_exponent": 1.0 / b,
            "log_factor": True,
            "optimal_B": f"(n / log n)^{2 / b:g}"
        }
    return {
        "regime": "p<=b, r0 at or above (log n / an)^(1/b)",
        "bias_term": f"(log n / n)^{p / b:g} / (log n)^2",
        "bias_exponent": p / b,
        "log_factor": True,
        "optimal_B": f"(n / log n)^{2 / b:g}"
    }
