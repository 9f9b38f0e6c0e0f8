#  controller/__init__.py
"""
持續同調近似器 - 控制器模組
連接核心計算與命令列介面
"""

# 導入控制器模組中的關鍵類和函數
from controller.input_controller import parse_dataset, load_dataset, build_experiment_config, reference_diagram
from controller.analysis_controller import approximate_ph, resolve_subsample_size, export_ot_matrix
from controller.experiment_controller import (rate_experiment, variance_rate_check, compare_means,
                                              bias_variance_check)
from controller.result_controller import ResultController

# 定義版本
__version__ = "1.0.0"

# 定義公開的API
__all__ = [
    'parse_dataset',  # 從input_controller導出
    'load_dataset',  # 從input_controller導出
    'build_experiment_config',  # 從input_controller導出
    'reference_diagram',  # 從input_controller導出
    'approximate_ph',  # 從analysis_controller導出
    'resolve_subsample_size',  # 從analysis_controller導出
    'export_ot_matrix',  # 從analysis_controller導出
    'rate_experiment',  # 從experiment_controller導出
    'variance_rate_check',  # 從experiment_controller導出
    'compare_means',  # 從experiment_controller導出
    'bias_variance_check',  # 從experiment_controller導出
    'ResultController'  # 從result_controller導出
]
