# data/file_manager.py
"""
持續同調近似器 - 檔案管理器
負責點雲、距離矩陣、持續圖與實驗紀錄的讀寫

功能：
1. 點雲 CSV（可含 # 註解行）與 PCF1 二進位格式
2. 距離矩陣 CSV，檢查方陣、非負、零對角線與精確對稱
3. 持續圖與持續測度 JSON
4. 可續跑的實驗 CSV（設定雜湊標頭、逐列附加）
5. 損失曲線摘要 CSV 與迭代軌跡 JSON lines
"""

import csv
import json
import logging
import math
import os
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from data.models import FiniteMetricSpace, PersistenceDiagram, PersistenceMeasure, PointCloud
from data.result_data import LossCurve, LossRow
from utils.errors import ConfigError, ParseError

logger = logging.getLogger("持續同調近似器.FileManager")

PathLike = Union[str, Path]

BINARY_MAGIC = b"PCF1"
_BINARY_HEADER = struct.Struct("<4sQQ")
HASH_PREFIX = "# config_sha256="
EXPERIMENT_HEADER = ["n", "repeat", "B", "loss"]
SUMMARY_HEADER = ["n", "B", "empirical_loss", "loss_std"]


def format_float(value: float) -> str:
    """17 位有效數字，double 可精確還原"""
    return format(float(value), ".17g")


class FileManager:
    """檔案管理類，負責所有輸入輸出格式"""

    def __init__(self, results_dir: Optional[PathLike] = None):
        """
        初始化檔案管理器

        Args:
            results_dir: 相對輸出路徑的基礎目錄，None 時直接使用呼叫者給的路徑
        """
        self.results_dir = Path(results_dir) if results_dir is not None else None
        if self.results_dir is not None:
            os.makedirs(self.results_dir, exist_ok=True)
        logger.debug(f"檔案管理器初始化完成，輸出目錄: {self.results_dir}")

    def resolve(self, path: PathLike) -> Path:
        """相對路徑接在輸出目錄之下"""
        path = Path(path)
        if self.results_dir is not None and not path.is_absolute():
            return self.results_dir / path
        return path

    @staticmethod
    def _require_file(path: Path):
        if not path.exists():
            logger.error(f"檔案不存在: {path}")
            raise FileNotFoundError(f"檔案不存在: {path}")

    @staticmethod
    def _ensure_parent(path: Path):
        if path.parent and not path.parent.exists():
            os.makedirs(path.parent, exist_ok=True)

    # ------ 點雲 ------

    def load_point_cloud(self, path: PathLike) -> PointCloud:
        """依檔頭魔術字判斷 PCF1 二進位或 CSV"""
        path = Path(path)
        self._require_file(path)
        with open(path, "rb") as f:
            magic = f.read(len(BINARY_MAGIC))
        if magic == BINARY_MAGIC:
            return self.load_point_binary(path)
        return self.load_point_csv(path)

    def _read_rows(self, path: Path) -> List[Tuple[int, List[float]]]:
        """讀取逗號分隔的實數列，略過空行與 # 註解，回傳 (行號, 數值)"""
        rows = []
        with open(path, "r", encoding="utf-8", newline="") as f:
            for line_no, line in enumerate(f, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    values = [float(cell) for cell in next(csv.reader([text]))]
                except ValueError as e:
                    raise ParseError(f"無法解析數值: {e}", path, line_no) from e
                if not all(math.isfinite(v) for v in values):
                    raise ParseError("包含非有限數值", path, line_no)
                rows.append((line_no, values))
        if not rows:
            raise ParseError("檔案沒有資料列", path)
        return rows

    def load_point_csv(self, path: PathLike) -> PointCloud:
        """
        讀取點雲 CSV

        Args:
            path: 每行一點、逗號分隔的檔案

        Returns:
            PointCloud: 載入的點雲

        Raises:
            ParseError: 數值錯誤或欄數不一致，附行號
        """
        path = Path(path)
        self._require_file(path)
        rows = self._read_rows(path)
        dim = len(rows[0][1])
        for line_no, values in rows:
            if len(values) != dim:
                raise ParseError(f"預期 {dim} 欄，收到 {len(values)} 欄", path, line_no)

        cloud = PointCloud(np.array([values for _, values in rows], dtype=np.float64))
        logger.info(f"載入點雲 {path}: {len(cloud)} 點, 維度 {cloud.dim}")
        return cloud

    def save_point_csv(self, cloud: PointCloud, path: PathLike) -> Path:
        path = self.resolve(path)
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            for point in cloud.points.tolist():
                writer.writerow([format_float(v) for v in point])
        logger.debug(f"已儲存點雲 CSV: {path}")
        return path

    def load_point_binary(self, path: PathLike) -> PointCloud:
        """
        讀取 PCF1：魔術字、little-endian u64 N 與 m，接著 N·m 個 f64

        Raises:
            ParseError: 檔頭或長度錯誤，訊息附位元組位移
        """
        path = Path(path)
        self._require_file(path)
        payload = path.read_bytes()
        if len(payload) < _BINARY_HEADER.size:
            raise ParseError(f"檔頭不完整，位元組位移 {len(payload)}", path)

        magic, N, m = _BINARY_HEADER.unpack_from(payload, 0)
        if magic != BINARY_MAGIC:
            raise ParseError(f"魔術字錯誤 {magic!r}，位元組位移 0", path)
        expected = _BINARY_HEADER.size + 8 * N * m
        if len(payload) != expected:
            raise ParseError(f"預期 {expected} 位元組，實際 {len(payload)}，位元組位移 {min(len(payload), expected)}", path)
        if N < 1 or m < 1:
            raise ParseError(f"N 與 m 必須為正，收到 N={N}, m={m}，位元組位移 4", path)

        points = np.frombuffer(payload, dtype="<f8", offset=_BINARY_HEADER.size).reshape(N, m).astype(np.float64)
        try:
            cloud = PointCloud(points)
        except ValueError as e:
            raise ParseError(str(e), path) from e
        logger.info(f"載入二進位點雲 {path}: {N} 點, 維度 {m}")
        return cloud

    def save_point_binary(self, cloud: PointCloud, path: PathLike) -> Path:
        path = self.resolve(path)
        self._ensure_parent(path)
        N, m = cloud.points.shape
        with open(path, "wb") as f:
            f.write(_BINARY_HEADER.pack(BINARY_MAGIC, N, m))
            f.write(np.ascontiguousarray(cloud.points, dtype="<f8").tobytes())
        logger.debug(f"已儲存二進位點雲: {path}")
        return path

    # ------ 距離矩陣 ------

    def load_metric_csv(self, path: PathLike) -> FiniteMetricSpace:
        """
        讀取距離矩陣 CSV：N 行、每行 N 個數值

        Raises:
            ParseError: 非方陣、負值、對角線非零或不對稱，附行號
        """
        path = Path(path)
        self._require_file(path)
        rows = self._read_rows(path)
        N = len(rows)
        for line_no, values in rows:
            if len(values) != N:
                raise ParseError(f"距離矩陣有 {N} 列，此列卻有 {len(values)} 欄", path, line_no)

        dist = np.array([values for _, values in rows], dtype=np.float64)
        for i, (line_no, values) in enumerate(rows):
            if dist[i, i] != 0:
                raise ParseError(f"對角線項 [{i}][{i}] = {dist[i, i]} 不為 0", path, line_no)
            negative = np.nonzero(dist[i] < 0)[0]
            if negative.size:
                raise ParseError(f"項 [{i}][{negative[0]}] 為負值", path, line_no)
            mismatch = np.nonzero(dist[i, :i] != dist[:i, i])[0]
            if mismatch.size:
                j = int(mismatch[0])
                raise ParseError(f"不對稱: [{i}][{j}] = {dist[i, j]}，[{j}][{i}] = {dist[j, i]}", path, line_no)

        logger.info(f"載入距離矩陣 {path}: {N}×{N}")
        return FiniteMetricSpace(dist)

    def save_matrix_csv(self, matrix: Union[np.ndarray, FiniteMetricSpace], path: PathLike) -> Path:
        """以距離矩陣 CSV 格式寫出 FiniteMetricSpace；成對 OT 矩陣也使用此格式"""
        if isinstance(matrix, FiniteMetricSpace):
            matrix = matrix.dist
        path = self.resolve(path)
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            for row in np.asarray(matrix, dtype=np.float64).tolist():
                writer.writerow([format_float(v) for v in row])
        logger.debug(f"已儲存矩陣 CSV: {path}")
        return path

    # ------ JSON ------

    def load_json(self, path: PathLike) -> Any:
        path = Path(path)
        self._require_file(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"JSON 解析錯誤: {e.msg}", path, e.lineno) from e

    def save_json(self, data: Any, path: PathLike, indent: Optional[int] = 2) -> Path:
        path = self.resolve(path)
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, ensure_ascii=False, indent=indent)
            f.write("\n")
        logger.debug(f"已儲存 JSON: {path}")
        return path

    def load_diagram(self, path: PathLike) -> PersistenceDiagram:
        data = self.load_json(path)
        try:
            return PersistenceDiagram.from_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"持續圖格式錯誤: {e}", path) from e

    def load_diagrams(self, path: PathLike) -> List[PersistenceDiagram]:
        """單一持續圖或持續圖串列"""
        data = self.load_json(path)
        items = data if isinstance(data, list) else [data]
        try:
            return [PersistenceDiagram.from_dict(item) for item in items]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"持續圖格式錯誤: {e}", path) from e

    def save_diagram(self, diagram: PersistenceDiagram, path: PathLike) -> Path:
        return self.save_json(diagram.to_dict(), path)

    def load_measure(self, path: PathLike) -> PersistenceMeasure:
        data = self.load_json(path)
        try:
            return PersistenceMeasure.from_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"持續測度格式錯誤: {e}", path) from e

    def save_measure(self, measure: PersistenceMeasure, path: PathLike) -> Path:
        return self.save_json(measure.to_dict(), path)

    def save_jsonl(self, records: Iterable[Dict[str, Any]], path: PathLike) -> Path:
        """每行一筆 JSON，用於迭代軌跡"""
        path = self.resolve(path)
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
        return path

    # ------ 實驗紀錄 ------

    def open_experiment_log(self, path: PathLike, config_hash: str) -> Dict[Tuple[int, int], Tuple[int, float]]:
        """
        開啟可續跑的實驗 CSV

        新檔案寫入雜湊與欄位標頭；既有檔案檢查雜湊並回傳已完成的格子。

        Args:
            path: 實驗 CSV 路徑
            config_hash: 目前設定的 SHA-256

        Returns:
            Dict: (n, repeat) → (B, loss)

        Raises:
            ConfigError: 既有檔案的設定雜湊不同
            ParseError: 既有檔案格式錯誤
        """
        path = self.resolve(path)
        if not path.exists() or path.stat().st_size == 0:
            self._ensure_parent(path)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(f"{HASH_PREFIX}{config_hash}\n")
                f.write(",".join(EXPERIMENT_HEADER) + "\n")
            logger.info(f"建立實驗紀錄: {path}")
            return {}

        completed = {}
        with open(path, "r", encoding="utf-8", newline="") as f:
            first = f.readline().strip()
            if not first.startswith(HASH_PREFIX):
                raise ParseError("缺少設定雜湊標頭", path, 1)
            recorded = first[len(HASH_PREFIX):]
            if recorded != config_hash:
                raise ConfigError(f"{path} 的設定雜湊 {recorded[:12]}… 與目前設定 {config_hash[:12]}… 不同")
            header = f.readline().strip()
            if header.split(",") != EXPERIMENT_HEADER:
                raise ParseError(f"欄位標頭錯誤: {header}", path, 2)
            for line_no, row in enumerate(csv.reader(f), start=3):
                if not row:
                    continue
                # 中斷寫入留下的殘缺列視為未完成
                if len(row) != 4:
                    logger.warning(f"{path} 第 {line_no} 行不完整，將重新計算")
                    continue
                try:
                    n, repeat, B, loss = int(row[0]), int(row[1]), int(row[2]), float(row[3])
                except ValueError as e:
                    raise ParseError(f"無法解析實驗列: {e}", path, line_no) from e
                completed[(n, repeat)] = (B, loss)

        logger.info(f"續跑實驗紀錄 {path}: 已完成 {len(completed)} 格")
        return completed

    def append_experiment_row(self, path: PathLike, n: int, repeat: int, B: int, loss: float):
        """附加一列並立即寫入磁碟"""
        path = self.resolve(path)
        with open(path, "a", encoding="utf-8", newline="") as f:
            f.write(f"{int(n)},{int(repeat)},{int(B)},{format_float(loss)}\n")
            f.flush()
            os.fsync(f.fileno())

    def save_loss_curve(self, curve: LossCurve, path: PathLike) -> Path:
        path = self.resolve(path)
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(f"# label={curve.label}\n")
            f.write(",".join(SUMMARY_HEADER) + "\n")
            for row in curve.rows:
                f.write(f"{row.n},{row.B},{format_float(row.empirical_loss)},{format_float(row.loss_std)}\n")
        logger.debug(f"已儲存損失曲線: {path}")
        return path

    def load_loss_curve(self, path: PathLike) -> LossCurve:
        path = Path(path)
        self._require_file(path)
        label = "empirical"
        rows = []
        with open(path, "r", encoding="utf-8", newline="") as f:
            for line_no, line in enumerate(f, start=1):
                text = line.strip()
                if text.startswith("# label="):
                    label = text[len("# label="):]
                    continue
                if not text or text.startswith("#") or text.split(",") == SUMMARY_HEADER:
                    continue
                cells = text.split(",")
                if len(cells) != 4:
                    raise ParseError(f"預期 4 欄，收到 {len(cells)} 欄", path, line_no)
                try:
                    rows.append(LossRow(int(cells[0]), int(cells[1]), float(cells[2]), float(cells[3])))
                except ValueError as e:
                    raise ParseError(f"無法解析損失列: {e}", path, line_no) from e
        return LossCurve(rows, label)
