# controller/result_controller.py
"""
持續同調近似器 - 結果控制器
負責把計算結果格式化並輸出：
1. 持續圖、持續測度與距離矩陣（JSON 或 CSV）
2. 距離憑證（匹配 / 運輸計畫）
3. 迭代軌跡（JSON lines）
4. 損失曲線、擬合與界限疊加的 SVG 圖
"""

import io
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from data.file_manager import FileManager, format_float
from data.models import Matching, PersistenceDiagram, PersistenceMeasure, TransportPlan
from data.result_data import LossCurve, RateFit
from utils.config import is_feature_enabled
from utils.logging import log_class_methods

logger = logging.getLogger("持續同調近似器.ResultController")


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _json_safe(value: Any) -> Any:
    """inf 轉為字串，其餘浮點數保留 repr 精度"""
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


@log_class_methods(exclude=["render"])
class ResultController:

    def __init__(self, fmt: str = "json", output: Optional[str] = None,
                 file_manager: Optional[FileManager] = None, stream: Optional[TextIO] = None):
        """
        初始化結果控制器

        Args:
            fmt: "json" 或 "csv"
            output: 輸出檔案；None 時寫到 stream
            file_manager: 檔案管理器
            stream: 預設為標準輸出
        """
        if fmt not in ("json", "csv"):
            raise ValueError(f"未知的輸出格式: {fmt}")
        self.fmt = fmt
        self.output = output
        self.file_manager = file_manager or FileManager()
        self.stream = stream if stream is not None else sys.stdout

    # ------ 輸出 ------

    def render(self, payload: Any, csv_header: Sequence[str], csv_rows: List[Sequence[Any]]) -> str:
        """依格式把資料轉為文字"""
        if self.fmt == "json":
            return json.dumps(_json_safe(payload), ensure_ascii=False, indent=2) + "\n"
        buffer = io.StringIO()
        buffer.write(",".join(csv_header) + "\n")
        for row in csv_rows:
            buffer.write(",".join(_csv_value(v) for v in row) + "\n")
        return buffer.getvalue()

    def emit(self, text: str) -> Optional[str]:
        """寫入輸出檔或串流，回傳檔案路徑"""
        if self.output:
            path = self.file_manager.resolve(self.output)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            logger.info(f"結果已寫入 {path}")
            return str(path)
        self.stream.write(text)
        self.stream.flush()
        return None

    def write_diagrams(self, diagrams: Sequence[PersistenceDiagram], extra: Optional[Dict[str, Any]] = None):
        """單張圖時 extra 併入 JSON 物件，如弗雷歇函數值"""
        rows = []
        for D in diagrams:
            rows.extend([D.homology_dim, b, d, m] for b, d, m in D.points)
            rows.extend([D.homology_dim, b, math.inf, 1] for b in D.essential)
        payload = [D.to_dict() for D in diagrams]
        if len(payload) == 1:
            payload = {**payload[0], **(extra or {})}
        return self.emit(self.render(payload, ["hom_dim", "birth", "death", "multiplicity"], rows))

    def write_measure(self, measure: PersistenceMeasure):
        rows = [[measure.hom_dim, x, y, m] for (x, y), m in zip(measure.points.tolist(), measure.masses.tolist())]
        return self.emit(self.render(measure.to_dict(), ["hom_dim", "birth", "death", "mass"], rows))

    def write_value(self, name: str, value: float, extra: Optional[Dict[str, Any]] = None):
        payload = {name: value, **(extra or {})}
        return self.emit(self.render(payload, list(payload), [list(payload.values())]))

    def write_records(self, records: Sequence[Dict[str, Any]]):
        """同欄位字典串列，如比較實驗或界限表"""
        header = list(records[0]) if records else []
        rows = [[record.get(k) for k in header] for record in records]
        return self.emit(self.render(list(records), header, rows))

    def write_matrix(self, matrix: np.ndarray):
        if self.fmt == "csv" and self.output:
            return str(self.file_manager.save_matrix_csv(matrix, self.output))
        rows = np.asarray(matrix, dtype=np.float64).tolist()
        header = [f"c{j}" for j in range(len(rows))]
        return self.emit(self.render(rows, header, rows))

    def write_curve(self, curve: LossCurve, fit: Optional[RateFit] = None):
        payload = curve.to_dict()
        if fit is not None:
            payload["fit"] = fit.to_dict()
        rows = [[r.n, r.B, r.empirical_loss, r.loss_std] for r in curve.rows]
        return self.emit(self.render(payload, ["n", "B", "empirical_loss", "loss_std"], rows))

    # ------ 附屬檔案 ------

    def save_certificate(self, certificate, path: str) -> str:
        """匹配或運輸計畫的 JSON，對角線寫成 null"""
        if isinstance(certificate, (Matching, TransportPlan)):
            data = certificate.to_dict()
        else:
            data = certificate
        return str(self.file_manager.save_json(_json_safe(data), path))

    def save_trace(self, trace: Sequence[Dict[str, Any]], path: str) -> str:
        return str(self.file_manager.save_jsonl(_json_safe(list(trace)), path))

    def save_diagrams(self, diagrams: Sequence[PersistenceDiagram], path: str) -> str:
        return str(self.file_manager.save_json([D.to_dict() for D in diagrams], path))

    def save_curve_plot(self, curve: LossCurve, path: str, fit: Optional[RateFit] = None,
                        bound: Optional[Sequence] = None, bound_label: str = "bound") -> Optional[str]:
        """features.svg_plots 關閉時不輸出"""
        if not is_feature_enabled("svg_plots"):
            logger.info("SVG 圖表功能已停用")
            return None
        from ui.plots import plot_loss_curve
        return str(plot_loss_curve(curve, self.file_manager.resolve(path), fit, bound, bound_label))

    def save_measure_plot(self, measure: PersistenceMeasure, path: str,
                          overlay: Optional[PersistenceDiagram] = None) -> Optional[str]:
        if not is_feature_enabled("svg_plots"):
            logger.info("SVG 圖表功能已停用")
            return None
        from ui.plots import plot_measure
        return str(plot_measure(measure, self.file_manager.resolve(path), overlay))
