# main.py
"""
持續同調近似器 - 主程式入口點
以子抽樣平均近似大型點雲的持續同調，並執行收斂實驗

用法：
    python main.py compute "torus:N=500" --dim 1
    python main.py experiment rate "torus:N=2000" --n-grid 100:500:100 --csv results/rate.csv
"""

import logging
import sys
from pathlib import Path

from ui.cli import main as cli_main

BASE_DIR = Path(__file__).resolve().parent
DEFAULT_CONFIG = BASE_DIR / "resources" / "config.json"

logger = logging.getLogger("持續同調近似器")


# 未捕捉例外處理
def handle_exception(exc_type, exc_value, exc_traceback):
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    logger.critical("未捕獲的異常", exc_info=(exc_type, exc_value, exc_traceback))
    print(f"發生意外錯誤: {exc_value}", file=sys.stderr)


sys.excepthook = handle_exception


# 主程式進入點
def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" not in argv and DEFAULT_CONFIG.exists():
        argv += ["--config", str(DEFAULT_CONFIG)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
