# utils/errors.py
"""
持續同調近似器 - 例外類別
定義應用程式共用的錯誤階層

功能：
1. 區分參數錯誤、檔案解析錯誤、設定錯誤與資料錯誤
2. 提供內部契約錯誤（過濾複形未排序或缺少面）
3. 對應命令列結束碼
"""

from pathlib import Path


class PHApproxError(Exception):
    """所有應用程式錯誤的基底類別"""

    exit_code = 1


class ArgumentError(PHApproxError, ValueError):
    """呼叫參數不符合前置條件"""

    exit_code = 2


class ConfigError(PHApproxError):
    """實驗設定無效，或缺少必要的參考圖"""

    exit_code = 2


class DataError(PHApproxError):
    """資料與請求不一致，如混合的同調維度"""

    exit_code = 3


class ParseError(PHApproxError, ValueError):
    """輸入檔案格式錯誤"""

    exit_code = 3

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        """
        Args:
            message: 錯誤描述
            path: 發生錯誤的檔案
            line: 從 1 起算的行號，二進位檔案為 None
        """
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = self.path
            if line is not None:
                location += f" 第 {line} 行"
            location += ": "
        super().__init__(f"{location}{message}")


class ContractError(PHApproxError, AssertionError):
    """內部契約違反，例如過濾序列未排序或不封閉"""
