#  utils/__init__.py
"""
持續同調近似器 - 通用工具模組包
提供跨模組共用的工具函數和設施

此模組包含：
1. 配置管理（config）
2. 日誌工具（logging）
3. 參數驗證（validators）
4. 例外類別（errors）
"""

# 導入核心功能
from utils.config import (initialize as init_config, get_config, set_config, save_config, get_path,
                          is_feature_enabled, reset as reset_config)

from utils.logging import (initialize as init_logging, get_logger, set_level, parse_level, DEBUG, INFO, WARNING,
                           ERROR, CRITICAL, log_function_call, log_class_methods)

from utils.validators import (require_positive_int, require_non_negative, require_positive,
                              require_finite_exponent, require_norm_index, resolve_norm_index,
                              require_increasing)

from utils.errors import (PHApproxError, ArgumentError, ConfigError, DataError, ParseError, ContractError)

# 定義版本
__version__ = "1.0.0"

# 定義公開的API
__all__ = [
    # 配置管理
    'init_config',
    'get_config',
    'set_config',
    'save_config',
    'get_path',
    'is_feature_enabled',
    'reset_config',

    # 日誌工具
    'init_logging',
    'get_logger',
    'set_level',
    'parse_level',
    'DEBUG',
    'INFO',
    'WARNING',
    'ERROR',
    'CRITICAL',
    'log_function_call',
    'log_class_methods',

    # 驗證工具
    'require_positive_int',
    'require_non_negative',
    'require_positive',
    'require_finite_exponent',
    'require_norm_index',
    'resolve_norm_index',
    'require_increasing',

    # 例外類別
    'PHApproxError',
    'ArgumentError',
    'ConfigError',
    'DataError',
    'ParseError',
    'ContractError'
]


# 初始化工具模組
def initialize(config_path=None, log_path=None, log_level=WARNING):
    """
    命令列啟動時的設定與日誌準備

    Args:
        config_path: 設定檔，None 時沿用已載入或預設的設定
        log_path: 日誌目錄，None 時取設定的 logs_dir
        log_level: logging 常數或 "INFO" 之類的名稱

    Returns:
        (Config, LoggerManager)

    Raises:
        ArgumentError: 無法辨識的日誌級別
        ConfigError: 設定檔無法載入
    """
    log_level = parse_level(log_level)
    config_manager = init_config(config_path)
    logger_manager = init_logging(log_path or get_path("logs_dir"), log_level)
    # 單例已存在時仍需套用本次的級別
    set_level(log_level)
    return config_manager, logger_manager
