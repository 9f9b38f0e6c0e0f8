#  controller/input_controller.py
"""
持續同調近似器 - 輸入控制器
把命令列參數與設定檔整理成資料集與實驗設定

功能：
1. 解析資料集描述字串（torus:N=5000,R=0.8,r=0.3 或檔案路徑）
2. 依資料集描述取樣或載入資料，並可加入高斯雜訊
3. 以設定檔預設值補齊實驗設定
4. 取得參考持續圖 D[𝒳]（計算或由檔案載入）
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from core.pointcloud import Data, derive_seed, perturb, sample_annulus, sample_sphere, sample_torus
from core.vr_persistence import vr_diagrams
from data.file_manager import FileManager
from data.input_data import DatasetKind, DatasetSpec, ExperimentConfig
from data.models import PersistenceDiagram
from utils.config import get_config
from utils.errors import ArgumentError, ConfigError

logger = logging.getLogger("持續同調近似器.InputController")

# 描述字串中的簡寫鍵
_KEY_ALIASES = {
    "R": "outer_radius",
    "r": "inner_radius",
    "radius": "radius",
    "dim": "ambient_dim",
    "N": "N",
    "seed": "seed",
    "noise": "noise",
}
_INT_KEYS = {"N", "ambient_dim", "seed"}


def parse_dataset(text: str) -> DatasetSpec:
    """
    解析資料集描述

    "torus:N=5000,R=0.8,r=0.3,seed=1"、"sphere:N=2000,radius=0.5,dim=4"、
    "annulus:N=5000,R=0.5,r=0.2"；距離矩陣寫成 "metric:路徑"，
    其餘字串視為點雲檔案路徑（CSV 或 PCF1）。

    Args:
        text: 描述字串

    Returns:
        DatasetSpec: 資料集描述
    """
    kind_text, sep, rest = text.partition(":")
    kinds = {k.value for k in DatasetKind}
    if not sep or kind_text not in kinds:
        return DatasetSpec(DatasetKind.POINTS, path=text)

    kind = DatasetKind(kind_text)
    if kind in (DatasetKind.POINTS, DatasetKind.METRIC):
        return DatasetSpec(kind, path=rest)

    fields: Dict[str, Any] = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in _KEY_ALIASES:
            raise ArgumentError(f"無法解析資料集參數 {item!r}")
        name = _KEY_ALIASES[key]
        try:
            fields[name] = int(value) if name in _INT_KEYS else float(value)
        except ValueError as e:
            raise ArgumentError(f"資料集參數 {key} 的值無效: {value!r}") from e
    try:
        return DatasetSpec(kind, **fields)
    except ValueError as e:
        raise ArgumentError(str(e)) from e


def load_dataset(spec: DatasetSpec, file_manager: Optional[FileManager] = None) -> Data:
    """
    依描述取樣或載入資料；noise > 0 時以衍生種子加入高斯雜訊

    Args:
        spec: 資料集描述
        file_manager: 檔案管理器

    Returns:
        PointCloud 或 FiniteMetricSpace
    """
    file_manager = file_manager or FileManager()
    if spec.kind == DatasetKind.TORUS:
        data = sample_torus(spec.N, spec.outer_radius, spec.inner_radius, spec.seed)
    elif spec.kind == DatasetKind.SPHERE:
        data = sample_sphere(spec.N, spec.radius, spec.ambient_dim, spec.seed)
    elif spec.kind == DatasetKind.ANNULUS:
        data = sample_annulus(spec.N, spec.outer_radius, spec.inner_radius, spec.seed)
    elif spec.kind == DatasetKind.METRIC:
        data = file_manager.load_metric_csv(spec.path)
    else:
        data = file_manager.load_point_cloud(spec.path)

    if spec.noise > 0:
        data = perturb(data, spec.noise, derive_seed(spec.seed, 0))
    logger.info(f"資料集 {spec.kind.value}: {len(data)} 點")
    return data


def build_experiment_config(dataset: DatasetSpec, n_grid, **overrides) -> ExperimentConfig:
    """
    以設定檔的 experiment / bounds 區段補齊未指定的欄位

    Args:
        dataset: 資料集描述
        n_grid: 子樣本大小網格
        overrides: 命令列指定的欄位，值為 None 者視為未指定

    Returns:
        ExperimentConfig: 實驗設定

    Raises:
        ConfigError: 設定不合法
    """
    fields = {
        "p": get_config("transport.p", 2.0),
        "q": get_config("transport.q"),
        "hom_dim": 1,
        "b_rule": get_config("experiment.b_rule", "proportional"),
        "b_coef": get_config("experiment.b_coef", 0.1),
        "repeats": get_config("experiment.repeats", 5),
        "master_seed": get_config("experiment.master_seed", 0),
        "with_replacement": get_config("experiment.with_replacement", False),
        "min_persistence": get_config("persistence.min_persistence", 0.0),
        "max_scale": get_config("persistence.max_scale"),
        "loss_power": get_config("experiment.loss_power", True),
        "a": get_config("bounds.a", 1.0),
        "b": get_config("bounds.b"),
        "r0": get_config("bounds.r0", 0.0),
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(dataset=dataset, n_grid=list(n_grid), **fields)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"實驗設定無效: {e}") from e


def reference_diagram(data: Data,
                      hom_dim: int,
                      max_scale: Optional[float] = None,
                      min_persistence: float = 0.0,
                      path: Optional[str] = None,
                      file_manager: Optional[FileManager] = None) -> PersistenceDiagram:
    """
    取得整個資料集的持續圖 D[𝒳]

    給定 path 時由檔案載入；否則資料點數不得超過 experiment.max_reference_points。

    Raises:
        ConfigError: 參考圖無法計算且未提供檔案，或檔案維度不符
    """
    if path:
        diagram = (file_manager or FileManager()).load_diagram(Path(path))
        if diagram.homology_dim != hom_dim:
            raise ConfigError(f"參考圖的同調維度為 {diagram.homology_dim}，實驗需要 {hom_dim}")
        logger.info(f"由 {path} 載入參考圖")
        return diagram

    limit = int(get_config("experiment.max_reference_points", 3000))
    if len(data) > limit:
        raise ConfigError(f"資料有 {len(data)} 點，超過可直接計算參考圖的上限 {limit}；請以 --reference 提供參考圖")

    logger.info(f"計算參考圖 D[𝒳]: {len(data)} 點, 維度 {hom_dim}")
    return vr_diagrams(data, hom_dim, max_scale, min_persistence)[hom_dim]
