# data/models.py
"""
持續同調近似器 - 資料模型
定義應用程式中使用的核心資料結構和模型

功能：
1. 點雲與有限度量空間（原始資料）
2. 過濾單形與持續圖（同調計算結果）
3. 持續測度（平均持續測度、量化結果）
4. 匹配與運輸計畫（距離求解器的憑證）
5. 支援資料序列化與反序列化
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

# 匹配或運輸計畫中代表對角線的索引
DIAGONAL = -1


def _as_matrix(values, columns: Optional[int] = None) -> np.ndarray:
    """轉為二維 float64 陣列，空輸入視為 0 列"""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return np.zeros((0, columns if columns is not None else 0), dtype=np.float64)
    if array.ndim != 2:
        raise ValueError(f"需要二維陣列，收到形狀 {array.shape}")
    return array


@dataclass(frozen=True)
class StandardAssumptionParams:
    """(a, b, r0) 標準假設：π(B(x, r)) ≥ min(1, a r^b)，r > r0"""

    a: float = 1.0
    b: float = 1.0
    r0: float = 0.0

    def __post_init__(self):
        """初始化後驗證"""
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValueError(f"a 必須為正: {self.a}")
        if not (np.isfinite(self.b) and self.b > 0):
            raise ValueError(f"b 必須為正: {self.b}")
        if not (np.isfinite(self.r0) and self.r0 >= 0):
            raise ValueError(f"r0 必須非負: {self.r0}")


@dataclass(eq=False)
class PointCloud:
    """m 維歐氏空間中的有限點集"""

    points: np.ndarray

    def __post_init__(self):
        """初始化後驗證"""
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError(f"點雲必須是 N×m 陣列，收到形狀 {self.points.shape}")
        if self.points.shape[0] < 1 or self.points.shape[1] < 1:
            raise ValueError("點雲至少需要一個點且維度 ≥ 1")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("點雲座標包含 NaN 或無窮大")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def equals(self, other: 'PointCloud') -> bool:
        return isinstance(other, PointCloud) and np.array_equal(self.points, other.points)


@dataclass(eq=False)
class FiniteMetricSpace:
    """以對稱距離矩陣表示的有限度量空間（不要求三角不等式）"""

    dist: np.ndarray

    def __post_init__(self):
        """初始化後驗證"""
        self.dist = np.asarray(self.dist, dtype=np.float64)
        if self.dist.ndim != 2 or self.dist.shape[0] != self.dist.shape[1]:
            raise ValueError(f"距離矩陣必須是方陣，收到形狀 {self.dist.shape}")
        if self.dist.shape[0] < 1:
            raise ValueError("距離矩陣至少需要一個點")
        if not np.all(np.isfinite(self.dist)):
            raise ValueError("距離矩陣包含非有限值")
        if np.any(self.dist < 0):
            raise ValueError("距離矩陣包含負值")
        if np.any(np.diag(self.dist) != 0):
            raise ValueError("距離矩陣對角線必須為 0")
        if not np.array_equal(self.dist, self.dist.T):
            raise ValueError("距離矩陣必須對稱")

    def __len__(self) -> int:
        return self.dist.shape[0]

    def equals(self, other: 'FiniteMetricSpace') -> bool:
        return isinstance(other, FiniteMetricSpace) and np.array_equal(self.dist, other.dist)


@dataclass(frozen=True, slots=True)
class FilteredSimplex:
    """過濾中的單形，過濾值為頂點間最大距離"""

    vertices: Tuple[int, ...]
    filtration_value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self) -> Tuple[float, int, Tuple[int, ...]]:
        return (self.filtration_value, len(self.vertices), self.vertices)


@dataclass
class PersistenceDiagram:
    """單一同調維度的持續圖，點以 (birth, death, multiplicity) 的字典序儲存"""

    homology_dim: int
    points: List[Tuple[float, float, int]] = field(default_factory=list)
    essential: List[float] = field(default_factory=list)

    def __post_init__(self):
        """正規化：合併重複點並排序"""
        counts: Counter = Counter()
        for entry in self.points:
            birth, death = float(entry[0]), float(entry[1])
            mult = int(entry[2]) if len(entry) > 2 else 1
            if not (np.isfinite(birth) and np.isfinite(death)):
                raise ValueError(f"有限點必須為有限值: ({birth}, {death})")
            if not birth < death:
                raise ValueError(f"birth 必須小於 death: ({birth}, {death})")
            if mult < 1:
                raise ValueError(f"重數必須 ≥ 1: {mult}")
            counts[(birth, death)] += mult
        self.points = [(b, d, m) for (b, d), m in sorted(counts.items())]
        self.essential = sorted(float(b) for b in self.essential)

    @classmethod
    def from_pairs(cls, homology_dim: int, pairs, essential=()) -> 'PersistenceDiagram':
        """從 (birth, death) 串列建立，重複的配對累加為重數"""
        return cls(homology_dim, [(b, d, 1) for b, d in pairs], list(essential))

    @property
    def n_points(self) -> int:
        """有限點總數（含重數）"""
        return sum(m for _, _, m in self.points)

    def expanded(self) -> np.ndarray:
        """依重數展開的 (k, 2) 陣列"""
        rows = [(b, d) for b, d, m in self.points for _ in range(m)]
        return _as_matrix(rows, 2)

    def is_empty(self) -> bool:
        return not self.points and not self.essential

    def to_dict(self) -> Dict[str, Any]:
        """轉換為字典表示"""
        return {
            "hom_dim": self.homology_dim,
            "points": [[b, d, m] for b, d, m in self.points],
            "essential": list(self.essential)
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PersistenceDiagram':
        """從字典建立實例"""
        return cls(int(data["hom_dim"]), [tuple(p) for p in data.get("points", [])],
                   list(data.get("essential", [])))


@dataclass(eq=False)
class PersistenceMeasure:
    """半平面 Ω 上的離散測度，原子依座標字典序排列且不重複"""

    points: np.ndarray
    masses: np.ndarray
    hom_dim: int = 0
    mass_denominator: Optional[int] = None

    def __post_init__(self):
        """正規化：合併座標相同的原子並排序"""
        points = _as_matrix(self.points, 2)
        masses = np.asarray(self.masses, dtype=np.float64).reshape(-1)
        if points.shape[1] != 2 or points.shape[0] != masses.shape[0]:
            raise ValueError(f"原子座標 {points.shape} 與質量 {masses.shape} 不一致")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(masses))):
            raise ValueError("原子座標或質量包含非有限值")
        if np.any(points[:, 0] >= points[:, 1]):
            raise ValueError("原子必須嚴格位於對角線上方")
        if np.any(masses <= 0):
            raise ValueError("原子質量必須為正")
        if self.mass_denominator is not None and int(self.mass_denominator) < 1:
            raise ValueError(f"質量分母必須 ≥ 1: {self.mass_denominator}")

        if points.shape[0] > 0:
            unique, inverse = np.unique(points, axis=0, return_inverse=True)
            merged = np.zeros(unique.shape[0], dtype=np.float64)
            np.add.at(merged, inverse.reshape(-1), masses)
            points, masses = unique, merged

        self.points = points
        self.masses = masses
        self.hom_dim = int(self.hom_dim)
        self.mass_denominator = None if self.mass_denominator is None else int(self.mass_denominator)

    @classmethod
    def empty(cls, hom_dim: int = 0, mass_denominator: Optional[int] = None) -> 'PersistenceMeasure':
        return cls(np.zeros((0, 2)), np.zeros(0), hom_dim, mass_denominator)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def exact_total_mass(self) -> Fraction:
        """分母已知時以有理數計算總質量"""
        if self.mass_denominator is None:
            return Fraction(self.total_mass)
        den = self.mass_denominator
        return Fraction(int(np.rint(self.masses * den).sum()), den)

    def integer_masses(self, scale: int) -> Optional[np.ndarray]:
        """質量乘上 scale 後若皆為整數則回傳，否則 None"""
        scaled = self.masses * scale
        rounded = np.rint(scaled)
        if np.all(np.abs(scaled - rounded) <= 1e-6) and np.all(rounded >= 1):
            return rounded
        return None

    def equals(self, other: 'PersistenceMeasure') -> bool:
        return (isinstance(other, PersistenceMeasure) and self.hom_dim == other.hom_dim
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.masses, other.masses))

    def to_dict(self) -> Dict[str, Any]:
        """轉換為字典表示"""
        return {
            "hom_dim": self.hom_dim,
            "atoms": [[float(x), float(y), float(m)] for (x, y), m in zip(self.points, self.masses)],
            "mass_denominator": self.mass_denominator
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PersistenceMeasure':
        """從字典建立實例"""
        atoms = data.get("atoms", [])
        points = [(a[0], a[1]) for a in atoms]
        masses = [a[2] for a in atoms]
        return cls(_as_matrix(points, 2), np.asarray(masses, dtype=np.float64), int(data["hom_dim"]),
                   data.get("mass_denominator"))


class MatchStatus(Enum):
    """距離求解的結果類型"""
    OPTIMAL = "optimal"
    ESSENTIAL_MISMATCH = "essential_mismatch"  # 本質類多重集不同，距離為 +∞


@dataclass
class Matching:
    """圖之間的部分雙射；索引指向 PersistenceDiagram.expanded() 的列，DIAGONAL 代表對角線"""

    pairs: List[Tuple[int, int]]
    cost: float
    status: MatchStatus = MatchStatus.OPTIMAL

    def to_dict(self) -> Dict[str, Any]:
        """轉換為字典表示"""
        return {
            "status": self.status.value,
            "cost": self.cost,
            "pairs": [[None if i == DIAGONAL else i, None if j == DIAGONAL else j] for i, j in self.pairs]
        }


@dataclass
class TransportPlan:
    """部分運輸計畫，流量以 (來源原子, 目標原子, 質量) 表示"""

    flows: List[Tuple[int, int, float]]
    cost: float

    def to_dict(self) -> Dict[str, Any]:
        """轉換為字典表示"""
        return {
            "cost": self.cost,
            "flows": [[None if i == DIAGONAL else i, None if j == DIAGONAL else j, m]
                      for i, j, m in self.flows]
        }
