import logging
from rich.console import Console
from rich.logging import RichHandler
from app.config import settings

# 共享控制台（文本/表格输出与日志都写到 stderr，stdout 只留给报告内容）
console = Console(stderr=True)


def setup_logging(level: str = None):
    """
    配置根日志记录器（只配置一次）

    参数：
    - level: 日志级别，默认读取 settings.LOG_LEVEL
    """
    root = logging.getLogger()
    if any(isinstance(h, RichHandler) for h in root.handlers):
        root.setLevel(level or settings.LOG_LEVEL)
        return
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(level or settings.LOG_LEVEL)
