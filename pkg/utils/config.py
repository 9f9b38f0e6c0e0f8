# utils/config.py
"""
設定檔

程式內建的 DEFAULT_CONFIG 是完整的設定樹；resources/config.json 或 --config 指定的檔案
只需列出要覆寫的鍵，載入時逐層合併。各模組以 "transport.p" 這類點號路徑讀取，
值為 None（例如 transport.q）時回傳呼叫端給的預設值。
"""
import copy
import json
import logging
import os

from utils.errors import ConfigError

logger = logging.getLogger("持續同調近似器.Config")

DEFAULT_CONFIG_FILE = os.path.join("resources", "config.json")

DEFAULT_CONFIG = {
    "app_name": "持續同調近似器",
    "version": "1.0.0",
    "logs_dir": "logs",
    "results_dir": "results",
    "persistence": {
        "max_hom_dim": 1,
        "max_scale": None,  # 包覆半徑
        "min_persistence": 0.0,
        "truncate_essential": False
    },
    "transport": {
        "p": 2.0,
        "q": None,  # 同 p
        "rescale_power": 8,  # p 達此值時先以最大成本縮放
        "emd_max_iter": 1000000,
        "dedupe_tol": 1e-12
    },
    "means": {
        "quantize_max_iter": 100,
        "quantize_rel_tol": 1e-6,
        "weiszfeld_iter": 30,
        "weiszfeld_tol": 1e-9,
        "frechet_max_iter": 50,
        "near_diagonal": 1e-3
    },
    "experiment": {
        "repeats": 5,
        "with_replacement": False,
        "threads": 1,
        "master_seed": 0,
        "b_rule": "proportional",
        "b_coef": 0.1,
        "loss_power": True,  # 損失取 OT_p^p
        "max_reference_points": 3000
    },
    "bounds": {
        "a": 1.0,
        "b": None,  # 取樣流形的內在維度
        "r0": 0.0
    },
    "features": {
        "svg_plots": True
    }
}

_config = None


def _merge(target: dict, overrides: dict) -> dict:
    """把 overrides 逐層併入 target，子樹皆為 dict 時遞迴"""
    for key, value in overrides.items():
        if isinstance(target.get(key), dict) and isinstance(value, dict):
            _merge(target[key], value)
        else:
            target[key] = value
    return target


class Config:
    """一份設定樹與其來源檔案"""

    def __init__(self, config_file=None, load_default_file=True):
        """
        Args:
            config_file: 指定的設定檔；讀不到時拋出 ConfigError
            load_default_file: 未指定檔案時，是否讀取存在的 resources/config.json
        """
        self.config = copy.deepcopy(DEFAULT_CONFIG)
        self.config_file = config_file or DEFAULT_CONFIG_FILE

        if config_file:
            self.load_config(strict=True)
        elif load_default_file and os.path.exists(self.config_file):
            self.load_config()

    def load_config(self, strict=False):
        """
        讀取 self.config_file 並合併

        Args:
            strict: True 時讀取或解析失敗拋出 ConfigError，否則只記錄後沿用預設值
        """
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                overrides = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            if strict:
                raise ConfigError(f"無法載入設定檔 {self.config_file}: {e}") from e
            logger.warning(f"略過設定檔 {self.config_file}: {e}")
            return

        if not isinstance(overrides, dict):
            raise ConfigError(f"設定檔頂層必須是物件: {self.config_file}")
        _merge(self.config, overrides)
        logger.info(f"已載入設定: {self.config_file}")

    def save_config(self):
        """寫出完整設定樹到 self.config_file"""
        directory = os.path.dirname(self.config_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(self.config_file, 'w', encoding='utf-8') as f:
            json.dump(self.config, f, ensure_ascii=False, indent=2)
        logger.info(f"已保存設定: {self.config_file}")

    def get(self, key, default=None):
        node = self.config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return default if node is None else node

    def set(self, key, value):
        *parents, leaf = key.split('.')
        node = self.config
        for part in parents:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[leaf] = value


# ------ 模組層級存取 ------


def initialize(config_file=None):
    """
    建立全域設定；已建立且未指定新檔案時沿用

    Args:
        config_file: 設定檔路徑

    Returns:
        Config: 全域設定
    """
    global _config
    if _config is None or config_file is not None:
        _config = Config(config_file)
        logger.debug(f"設定來源: {_config.config_file}")
    return _config


def reset():
    """回到純預設值，不讀任何檔案"""
    global _config
    _config = Config(load_default_file=False)
    return _config


def get_config(key=None, default=None):
    """
    Args:
        key: 點號路徑；None 時回傳整棵設定樹
        default: 鍵不存在或值為 None 時的回傳值
    """
    current = initialize()
    if key is None:
        return current.config
    return current.get(key, default)


def set_config(key, value):
    """設定單一值（只影響本次執行），成功時回傳 True"""
    try:
        initialize().set(key, value)
    except (AttributeError, TypeError) as e:
        logger.error(f"無法設定 {key}: {e}")
        return False
    return True


def save_config(config_file=None):
    """
    寫出目前設定

    Args:
        config_file: 目標路徑，None 時寫回來源檔案

    Returns:
        bool: 是否成功
    """
    current = initialize()
    if config_file:
        current.config_file = config_file
    try:
        current.save_config()
    except OSError as e:
        logger.error(f"保存設定失敗: {e}")
        return False
    return True


def get_path(key):
    """讀取路徑設定；鍵名以 _dir 結尾時確保目錄存在"""
    path = get_config(key)
    if path and key.endswith('_dir'):
        os.makedirs(path, exist_ok=True)
    return path


def is_feature_enabled(feature_name):
    return bool(get_config(f"features.{feature_name}", False))
