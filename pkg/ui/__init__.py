#  ui/__init__.py
"""
持續同調近似器 - 使用者介面模組包
提供命令列與圖表輸出

此模組包含：
1. 命令列介面（cli）
2. SVG 圖表（plots）
"""

from ui.cli import main, build_parser
from ui.plots import plot_loss_curve, plot_measure

# 定義版本
__version__ = "1.0.0"

# 定義公開的API
__all__ = [
    # 命令列
    'main',
    'build_parser',

    # 圖表
    'plot_loss_curve',
    'plot_measure'
]
