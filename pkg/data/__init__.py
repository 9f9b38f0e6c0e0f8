#  data/__init__.py
"""
持續同調近似器 - 資料層模組包
管理點雲、持續圖與實驗結果的模型和檔案存取

此模組包含：
1. 資料模型定義 (models)
2. 輸入與設定資料 (input_data)
3. 結果資料 (result_data)
4. 檔案管理功能 (file_manager)
"""

# 導入核心功能
from data.models import (
    StandardAssumptionParams, PointCloud, FiniteMetricSpace, FilteredSimplex,
    PersistenceDiagram, PersistenceMeasure, MatchStatus, Matching, TransportPlan, DIAGONAL
)

from data.input_data import (
    DatasetKind, BRule, DatasetSpec, QuantizationConfig, FrechetConfig, ApproximationOptions, ExperimentConfig
)

from data.result_data import (
    LossRow, LossCurve, RateFit, QuantizationResult, FrechetResult, ApproximationResult, CompareRow
)

from data.file_manager import FileManager

# 定義版本
__version__ = "1.0.0"

# 定義公開的API
__all__ = [
    # 資料模型
    'StandardAssumptionParams', 'PointCloud', 'FiniteMetricSpace', 'FilteredSimplex',
    'PersistenceDiagram', 'PersistenceMeasure', 'MatchStatus', 'Matching', 'TransportPlan', 'DIAGONAL',

    # 輸入與設定
    'DatasetKind', 'BRule', 'DatasetSpec', 'QuantizationConfig', 'FrechetConfig',
    'ApproximationOptions', 'ExperimentConfig',

    # 結果
    'LossRow', 'LossCurve', 'RateFit', 'QuantizationResult', 'FrechetResult',
    'ApproximationResult', 'CompareRow',

    # 檔案管理
    'FileManager'
]


# 初始化函數
def initialize(results_dir=None):
    """
    初始化資料層

    Args:
        results_dir: 相對路徑的基準目錄，None 時直接使用給定路徑

    Returns:
        FileManager: 檔案管理器
    """
    return FileManager(results_dir)
