# utils/logging.py
"""
持續同調近似器 - 日誌工具

標準輸出保留給命令結果，所以控制台日誌一律寫到 stderr。
檔案日誌分三份：app.log（大小輪替）、daily.log（每日輪替）、error.log（只收 ERROR 以上，附檔名行號）。
另提供計時裝飾器，給持續同調、平均與實驗等耗時入口使用。
"""

import functools
import logging
import os
import sys
import time
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path

from utils.errors import ArgumentError

APP_LOGGER_NAME = "持續同調近似器"

_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
_LINE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
_ERROR_FORMAT = _LINE_FORMAT + '\n  at %(pathname)s:%(lineno)d'
_MAX_BYTES = 10 * 1024 * 1024
_BACKUPS = 5
_DAILY_BACKUPS = 30

# 日誌級別常量
DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR
CRITICAL = logging.CRITICAL


def _formatter(fmt: str) -> logging.Formatter:
    return logging.Formatter(fmt, datefmt=_DATE_FORMAT)


class LoggerManager:
    """根日誌記錄器的單例設定者"""

    _instance = None

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.initialized = False
        return cls._instance

    def __init__(self, log_dir=None, log_level=logging.INFO, enable_console=True, enable_files=True):
        """
        Args:
            log_dir: 日誌目錄，None 時為專案根目錄下的 logs/
            log_level: 控制台與一般檔案的級別
            enable_console: 是否輸出到 stderr
            enable_files: 是否寫入日誌檔
        """
        if self.initialized:
            return

        self.log_dir = log_dir or os.path.join(Path(__file__).resolve().parent.parent, "logs")
        self.log_level = log_level
        self.enable_console = enable_console
        self.enable_files = enable_files
        # error.log 的級別固定，set_level 時跳過
        self._pinned = set()

        root = logging.getLogger()
        root.setLevel(log_level)
        for handler in root.handlers[:]:
            root.removeHandler(handler)
        for handler in self._build_handlers():
            root.addHandler(handler)

        self.initialized = True
        self.app_logger = logging.getLogger(APP_LOGGER_NAME)
        self.app_logger.debug(f"日誌系統就緒，目錄 {self.log_dir if enable_files else '(停用)'}")

    def _build_handlers(self):
        handlers = []
        if self.enable_console:
            console = logging.StreamHandler(sys.stderr)
            console.setLevel(self.log_level)
            console.setFormatter(_formatter(_LINE_FORMAT))
            handlers.append(console)

        if not self.enable_files:
            return handlers

        os.makedirs(self.log_dir, exist_ok=True)

        def path(name):
            return os.path.join(self.log_dir, name)

        rolling = RotatingFileHandler(path("app.log"), maxBytes=_MAX_BYTES, backupCount=_BACKUPS, encoding='utf-8')
        daily = TimedRotatingFileHandler(path("daily.log"), when='midnight', backupCount=_DAILY_BACKUPS,
                                         encoding='utf-8')
        for handler in (rolling, daily):
            handler.setLevel(self.log_level)
            handler.setFormatter(_formatter(_LINE_FORMAT))
            handlers.append(handler)

        errors = RotatingFileHandler(path("error.log"), maxBytes=_MAX_BYTES, backupCount=_BACKUPS, encoding='utf-8')
        errors.setLevel(logging.ERROR)
        errors.setFormatter(_formatter(_ERROR_FORMAT))
        self._pinned.add(errors)
        handlers.append(errors)
        return handlers

    def get_logger(self, name):
        return logging.getLogger(name)

    def set_level(self, level):
        """調整根記錄器與非固定處理器的級別"""
        self.log_level = level
        root = logging.getLogger()
        root.setLevel(level)
        for handler in root.handlers:
            if handler not in self._pinned:
                handler.setLevel(level)
        self.app_logger.debug(f"日誌級別: {logging.getLevelName(level)}")


# ------ 模組層級的便捷函數 ------


def initialize(log_dir=None, log_level=logging.INFO, enable_console=True, enable_files=True):
    """建立（或取回已建立的）LoggerManager"""
    return LoggerManager(log_dir, log_level, enable_console, enable_files)


def get_logger(name):
    """
    取得記錄器；不含前綴的名稱會掛到應用程式記錄器之下

    Args:
        name: "Transport" 或完整名稱 "持續同調近似器.Transport"
    """
    if name.startswith(APP_LOGGER_NAME) or "." in name:
        return logging.getLogger(name)
    return logging.getLogger(f"{APP_LOGGER_NAME}.{name}")


def parse_level(level):
    """
    Args:
        level: logging 常數或 "DEBUG" 之類的名稱（不分大小寫）

    Raises:
        ArgumentError: 無法辨識的名稱
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        raise ArgumentError(f"未知的日誌級別: {level}")
    return value


def set_level(level):
    level = parse_level(level)
    if LoggerManager._instance is None or not LoggerManager._instance.initialized:
        initialize(log_level=level, enable_files=False)
        return
    LoggerManager().set_level(level)


# ------ 裝飾器 ------


def _describe(value):
    """陣列只記形狀，長串列只記長度"""
    shape = getattr(value, "shape", None)
    if shape is not None:
        return f"<{type(value).__name__} shape={shape}>"
    if isinstance(value, (list, tuple)) and len(value) > 8:
        return f"<{type(value).__name__} len={len(value)}>"
    return repr(value)


def log_function_call(logger=None):
    """
    記錄呼叫參數與耗時（DEBUG），失敗時記 ERROR 後重新拋出

    用法:
        @log_function_call()
        def approximate_ph(data, n, B, seed, options):
            ...
    """

    def decorator(func):
        func_logger = logger or logging.getLogger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if func_logger.isEnabledFor(logging.DEBUG):
                shown = [_describe(a) for a in args] + [f"{k}={_describe(v)}" for k, v in kwargs.items()]
                func_logger.debug(f"→ {func.__name__}({', '.join(shown)})")
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                func_logger.error(f"{func.__name__} 失敗（{time.perf_counter() - started:.3f}s）: {e}")
                raise
            func_logger.debug(f"← {func.__name__} {time.perf_counter() - started:.3f}s")
            return result

        return wrapper

    return decorator


def log_class_methods(cls=None, exclude=None):
    """
    對類別的所有公開方法套用 log_function_call

    用法:
        @log_class_methods(exclude=["render"])
        class ResultController:
            ...
    """
    skipped = set(exclude or ())

    def decorate(target):
        logger = logging.getLogger(f"{APP_LOGGER_NAME}.{target.__name__}")
        for name, member in list(vars(target).items()):
            if name.startswith('_') or name in skipped or not callable(member):
                continue
            setattr(target, name, log_function_call(logger)(member))
        return target

    return decorate(cls) if cls is not None else decorate
