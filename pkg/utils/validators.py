# utils/validators.py
"""
持續同調近似器 - 參數驗證
各計算模組共用的前置條件檢查，失敗時拋出 ArgumentError
"""

import math
from typing import Sequence

from utils.errors import ArgumentError


def require_positive_int(value, name: str) -> int:
    """檢查正整數"""
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ArgumentError(f"{name} 必須是正整數，收到 {value!r}")
    return int(value)


def require_non_negative(value, name: str) -> float:
    """檢查非負有限實數"""
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ArgumentError(f"{name} 必須是非負實數，收到 {value!r}")
    return value


def require_positive(value, name: str) -> float:
    """檢查正有限實數"""
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ArgumentError(f"{name} 必須是正實數，收到 {value!r}")
    return value


def require_finite_exponent(p, name: str = "p") -> float:
    """檢查有限的指數 p ≥ 1"""
    p = float(p)
    if not math.isfinite(p) or p < 1:
        raise ArgumentError(f"{name} 必須是有限實數且 ≥ 1，收到 {p!r}")
    return p


def require_norm_index(q, name: str = "q") -> float:
    """檢查範數指標 q ∈ [1, ∞]"""
    q = float(q)
    if math.isnan(q) or q < 1:
        raise ArgumentError(f"{name} 必須在 [1, ∞]，收到 {q!r}")
    return q


def resolve_norm_index(p: float, q) -> float:
    """q 未指定時沿用 p"""
    return require_norm_index(p if q is None else q)


def require_increasing(values: Sequence, name: str) -> list:
    """檢查嚴格遞增序列"""
    values = list(values)
    if not values:
        raise ArgumentError(f"{name} 不能為空")
    for prev, cur in zip(values, values[1:]):
        if cur <= prev:
            raise ArgumentError(f"{name} 必須嚴格遞增，{prev} 之後出現 {cur}")
    return values
