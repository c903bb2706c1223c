import math
import re
from typing import Dict, List, Optional
from app.errors import ConfigError

# 检查目录（报告按此顺序排列）
CHECK_NAMES = (
    "metric",
    "soliton",
    "ricci_soliton",
    "trace",
    "lemma",
    "bianchi",
    "geodesic",
    "curv_identity",
    "codazzi",
    "weyl",
    "decomposition",
    "eigenvector",
    "causal",
    "isotropy",
    "wave_structure",
    "recurrence",
    "two_symmetric",
    "conformally_symmetric",
    "closed_form",
    "radial",
    "completeness",
)

OUTPUT_FORMATS = ("json", "csv", "text")

_KEY_PATTERN = r'^[A-Za-z_][A-Za-z0-9_]*$'


def validate_key(key: str) -> bool:
    """
    验证参数名格式

    规则：字母或下划线开头，只含字母、数字、下划线
    正则：^[A-Za-z_][A-Za-z0-9_]*$

    示例：
    - a11 ✓
    - kappa1 ✓
    - t_min ✓
    - 1a ✗ (数字开头)
    """
    return bool(re.match(_KEY_PATTERN, key))


def parse_key_values(text: Optional[str], option: str = "--param") -> Dict[str, str]:
    """
    解析 k=v,k=v 形式的参数串

    值里可以出现括号内的逗号（例如 H=exp(x1)*cosh(u)），只有括号外的逗号才分隔参数。

    异常：
    - ConfigError: 缺少等号、参数名非法或重复
    """
    if text is None or not text.strip():
        return {}
    items = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(current))
            current = []
            continue
        current.append(ch)
    items.append("".join(current))

    result = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"{option} 中的 '{item}' 缺少 '='")
        key, value = (part.strip() for part in item.split("=", 1))
        if not validate_key(key):
            raise ConfigError(f"{option} 中的参数名 '{key}' 不合法")
        if key in result:
            raise ConfigError(f"{option} 中的参数 '{key}' 重复出现")
        if not value:
            raise ConfigError(f"{option} 中的参数 '{key}' 没有取值")
        result[key] = value
    return result


def validate_check_names(names: List[str]) -> List[str]:
    """检查名必须属于检查目录；去重并保持给定顺序"""
    unknown = [name for name in names if name not in CHECK_NAMES]
    if unknown:
        raise ConfigError(f"未知的检查: {', '.join(unknown)}（可选: {', '.join(CHECK_NAMES)}）")
    seen = []
    for name in names:
        if name not in seen:
            seen.append(name)
    return seen


def parse_check_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    names = [part.strip() for part in text.split(",") if part.strip()]
    return validate_check_names(names)


def parse_tolerances(text: Optional[str]) -> Dict[str, float]:
    """
    解析 --tol name=ε,…；name 为检查名，ε 为正的有限数

    异常：
    - ConfigError: 检查名未知或容差不是正数
    """
    raw = parse_key_values(text, option="--tol")
    validate_check_names(list(raw))
    result = {}
    for name, value in raw.items():
        try:
            tol = float(value)
        except ValueError:
            raise ConfigError(f"--tol 中 {name} 的容差 '{value}' 不是数")
        if not math.isfinite(tol) or tol <= 0:
            raise ConfigError(f"--tol 中 {name} 的容差必须为正: {value}")
        result[name] = tol
    return result
