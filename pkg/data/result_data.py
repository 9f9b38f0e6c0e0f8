from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .models import PersistenceDiagram, PersistenceMeasure


@dataclass
class LossRow:
    n: int
    B: int
    empirical_loss: float
    loss_std: float


@dataclass
class LossCurve:
    rows: List[LossRow] = field(default_factory=list)
    label: str = "empirical"  # 以代理平均計算時標記為 "proxy"

    @property
    def ns(self) -> List[int]:
        return [row.n for row in self.rows]

    @property
    def losses(self) -> List[float]:
        return [row.empirical_loss for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "rows": [[r.n, r.B, r.empirical_loss, r.loss_std] for r in self.rows]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LossCurve':
        rows = [LossRow(int(n), int(B), float(loss), float(std)) for n, B, loss, std in data.get("rows", [])]
        return cls(rows=rows, label=data.get("label", "empirical"))


@dataclass
class RateFit:
    a0: float
    a1: float
    c: float
    sse: float
    model: str  # "fixed" 或 "free"

    def predict(self, n):
        return self.a0 + self.a1 * n**(-self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {"a0": self.a0, "a1": self.a1, "c": self.c, "sse": self.sse, "model": self.model}


@dataclass
class QuantizationResult:
    measure: PersistenceMeasure  # 質心與其格子質量
    diagram: PersistenceDiagram  # 四捨五入為整數重數的呈現用圖
    loss: float
    trace: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class FrechetResult:
    diagram: PersistenceDiagram
    value: float
    trace: List[Dict[str, Any]] = field(default_factory=list)
    converged: bool = False


@dataclass
class ApproximationResult:
    mean: PersistenceMeasure
    diagrams: List[PersistenceDiagram]
    frechet: Optional[FrechetResult] = None
    quantized: Optional[QuantizationResult] = None


@dataclass
class CompareRow:
    """同一 n 下弗雷歇平均與平均持續測度對參考圖的損失"""
    n: int
    B: int
    sigma: float
    frechet_loss: float  # W₂²(弗雷歇平均, D[𝒳])
    measure_loss: float  # OT₂²(D̄, D[𝒳])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "B": self.B,
            "sigma": self.sigma,
            "frechet_loss": self.frechet_loss,
            "measure_loss": self.measure_loss
        }
