"""
测试工具模块 - 统一的日志格式与数值断言辅助

所有测试脚本都可以 `from test_utils import *` 使用。
"""

import logging
import os
import sys
from pathlib import Path
import numpy as np

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).parent.parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))


class Colors:
    GREEN = '\033[92m'    # 成功
    RED = '\033[91m'      # 错误
    YELLOW = '\033[93m'   # 警告
    BLUE = '\033[94m'     # 信息
    CYAN = '\033[96m'     # 章节标题
    BOLD = '\033[1m'
    RESET = '\033[0m'


def _supports_color():
    if sys.platform.startswith('win'):
        return os.environ.get('TERM') == 'xterm-256color' or 'ANSICON' in os.environ
    return hasattr(sys.stdout, 'isatty') and sys.stdout.isatty()


SUPPORTS_COLOR = _supports_color()


def _colorize(text, color):
    if SUPPORTS_COLOR:
        return f"{color}{text}{Colors.RESET}"
    return text


def log_section(title, char="═", length=70):
    """记录一个新的测试章节"""
    line = f" 🔹 {title} "
    padding = max(0, (length - len(line)) // 2)
    logger.info(char * padding + _colorize(line, Colors.CYAN + Colors.BOLD) + char * padding)


def log_test_start(test_name):
    logger.info(f"开始执行: {_colorize(f'🧪 {test_name}', Colors.BLUE + Colors.BOLD)}")


def log_success(message):
    logger.info(_colorize(f"✅ {message}", Colors.GREEN + Colors.BOLD))


def log_error(message):
    logger.error(_colorize(f"❌ {message}", Colors.RED + Colors.BOLD))


def log_info(message):
    logger.info(_colorize(f"ℹ️  {message}", Colors.BLUE))


def log_warning(message):
    logger.warning(_colorize(f"⚠️  {message}", Colors.YELLOW + Colors.BOLD))


# ---- 数值辅助 ----

def max_over_points(tensor, points):
    """张量（或标量场）在一组点上的最大分量绝对值"""
    worst = 0.0
    for point in points:
        value = np.asarray(tensor.evaluate(point), dtype=float)
        worst = max(worst, float(np.max(np.abs(value))))
    return worst


def assert_small(value, tol, label):
    """断言残差不超过容差，并记录实际值"""
    log_info(f"{label}: {value:.3e}（容差 {tol:.0e}）")
    assert value <= tol, f"{label} 残差 {value:.3e} 超过容差 {tol:.0e}"


def run_as_script(test_file):
    """测试文件作为脚本运行时调用 pytest"""
    import pytest

    logging.basicConfig(level=logging.INFO, format='%(message)s')
    sys.exit(pytest.main([str(test_file), "-v"]))
