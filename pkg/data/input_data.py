# data/input_data.py
"""
持續同調近似器 - 輸入資料
描述資料集、子抽樣選項與各演算法的設定
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from data.models import PersistenceDiagram


class DatasetKind(Enum):
    TORUS = "torus"
    SPHERE = "sphere"
    ANNULUS = "annulus"
    POINTS = "points"  # 點雲檔案（CSV 或 PCF1）
    METRIC = "metric"  # 距離矩陣 CSV


class BRule(Enum):
    """子樣本數 B 隨 n 的選取規則"""
    EXPLICIT = "explicit"  # 與 n_grid 等長的 B 串列
    PROPORTIONAL = "proportional"  # B = ⌈c·n⌉
    POWER = "power"  # B = ⌈n^e⌉
    POWER_FLOOR = "power_floor"  # B = ⌊n^e⌋
    OPTIMAL = "optimal"  # 平衡變異與偏差的 B


@dataclass
class DatasetSpec:
    kind: DatasetKind
    N: int = 0
    outer_radius: float = 0.0
    inner_radius: float = 0.0
    radius: float = 0.5
    ambient_dim: int = 4
    path: Optional[str] = None
    seed: int = 0
    noise: float = 0.0  # 載入後加入的高斯雜訊標準差

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = DatasetKind(self.kind)
        if self.kind in (DatasetKind.POINTS, DatasetKind.METRIC) and not self.path:
            raise ValueError(f"{self.kind.value} 資料集需要檔案路徑")
        if self.kind in (DatasetKind.TORUS, DatasetKind.SPHERE, DatasetKind.ANNULUS) and self.N < 1:
            raise ValueError(f"取樣資料集需要 N ≥ 1，收到 {self.N}")

    @property
    def intrinsic_dim(self) -> Optional[int]:
        """合成流形的內在維度，檔案資料集未知"""
        if self.kind == DatasetKind.TORUS:
            return 2
        if self.kind == DatasetKind.SPHERE:
            return self.ambient_dim - 1
        if self.kind == DatasetKind.ANNULUS:
            return 2
        return None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DatasetSpec':
        return cls(**data)


@dataclass
class QuantizationConfig:
    k: int = 1
    init: Optional[np.ndarray] = None  # 明確的質心；None 代表依持續度貪婪挑選
    max_iter: int = 100
    rel_tol: float = 1e-6
    p: float = 2.0
    q: Optional[float] = None

    def __post_init__(self):
        if self.init is not None:
            self.init = np.asarray(self.init, dtype=np.float64).reshape(-1, 2)
            self.k = self.init.shape[0]
        if self.k < 1:
            raise ValueError(f"質心數 k 必須 ≥ 1，收到 {self.k}")
        if self.max_iter < 1 or self.rel_tol <= 0:
            raise ValueError("max_iter 與 rel_tol 必須為正")
        if self.p < 1:
            raise ValueError(f"p 必須 ≥ 1，收到 {self.p}")


@dataclass
class FrechetConfig:
    # 整數：以該圖為起點；"median"：總持續度中位數的圖；"random"：依 seed 挑選；或直接給定圖
    init: Union[int, str, PersistenceDiagram] = "median"
    seed: int = 0
    max_iter: int = 50
    n_jobs: int = 1

    def __post_init__(self):
        if isinstance(self.init, str) and self.init not in ("median", "random"):
            raise ValueError(f"未知的初始化方式: {self.init}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter 必須 ≥ 1，收到 {self.max_iter}")


@dataclass
class ApproximationOptions:
    hom_dim: int = 1
    max_scale: Optional[float] = None
    min_persistence: float = 0.0
    with_replacement: bool = False
    frechet: Optional[FrechetConfig] = None
    quantization: Optional[QuantizationConfig] = None
    n_jobs: int = 1


@dataclass
class ExperimentConfig:
    dataset: DatasetSpec
    n_grid: List[int]
    p: float = 2.0
    q: Optional[float] = None
    hom_dim: int = 1
    b_rule: BRule = BRule.PROPORTIONAL
    b_coef: float = 0.1
    b_values: List[int] = field(default_factory=list)
    repeats: int = 5
    master_seed: int = 0
    with_replacement: bool = False
    min_persistence: float = 0.0
    max_scale: Optional[float] = None
    loss_power: bool = True
    reference_path: Optional[str] = None
    a: float = 1.0
    b: Optional[float] = None
    r0: float = 0.0

    def __post_init__(self):
        if isinstance(self.b_rule, str):
            self.b_rule = BRule(self.b_rule)
        if isinstance(self.dataset, dict):
            self.dataset = DatasetSpec.from_dict(self.dataset)
        self.n_grid = [int(n) for n in self.n_grid]
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid 必須是正整數串列")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid 必須嚴格遞增: {self.n_grid}")
        if self.repeats < 1:
            raise ValueError(f"repeats 必須 ≥ 1，收到 {self.repeats}")
        if self.b_rule == BRule.EXPLICIT and len(self.b_values) != len(self.n_grid):
            raise ValueError("explicit 規則需要與 n_grid 等長的 B 串列")
        if self.b_rule in (BRule.PROPORTIONAL, BRule.POWER, BRule.POWER_FLOOR) and self.b_coef <= 0:
            raise ValueError(f"B 規則係數必須為正，收到 {self.b_coef}")

    @property
    def norm_index(self) -> float:
        return self.p if self.q is None else self.q

    @property
    def assumption_b(self) -> Optional[float]:
        return self.b if self.b is not None else self.dataset.intrinsic_dim

    def subsample_count(self, n: int) -> int:
        """依規則計算給定 n 的 B，至少為 1"""
        if self.b_rule == BRule.EXPLICIT:
            return max(1, int(self.b_values[self.n_grid.index(n)]))
        if self.b_rule == BRule.PROPORTIONAL:
            return max(1, math.ceil(self.b_coef * n - 1e-9))
        if self.b_rule == BRule.POWER:
            return max(1, math.ceil(n ** self.b_coef - 1e-9))
        if self.b_rule == BRule.POWER_FLOOR:
            return max(1, math.floor(n ** self.b_coef + 1e-9))

        from core.bounds import optimal_subsample_count
        if self.assumption_b is None:
            raise ValueError("optimal 規則需要指定 b")
        return optimal_subsample_count(n, self.p, self.assumption_b)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["dataset"] = self.dataset.to_dict()
        data["b_rule"] = self.b_rule.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        data = dict(data)
        data["dataset"] = DatasetSpec.from_dict(data["dataset"])
        return cls(**data)

    def config_hash(self) -> str:
        """影響結果的設定之 SHA-256，執行緒數不列入"""
        payload = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()
