"""
表达式文本语法（CLI 参数与度量描述文件共用）

语法：
- 中缀四则运算 + - * /，括号分组
- ^ 表示整数次幂（打印 sqrt 时会出现半整数指数，解析时同样接受）
- 函数：exp log sqrt sin cos tan sinh cosh tanh（单参数）
- 常量：整数、小数（解析时转换为精确有理数）、pi、E
- 标识符：当前坐标卡的坐标名（例如 u v x1 x2 t s）

解析后再打印得到的文本可以被原样解析回同一表达式。
"""
import math
import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import (
    parse_expr,
    standard_transformations,
    convert_xor,
    rationalize,
)
from app.errors import ParameterError

ALLOWED_FUNCTIONS = {
    "exp": sp.exp,
    "log": sp.log,
    "sqrt": sp.sqrt,
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "sinh": sp.sinh,
    "cosh": sp.cosh,
    "tanh": sp.tanh,
}

ALLOWED_CONSTANTS = {"pi": sp.pi, "E": sp.E}

_TRANSFORMATIONS = standard_transformations + (convert_xor, rationalize)

_GLOBAL_DICT = {
    "Integer": sp.Integer,
    "Float": sp.Float,
    "Rational": sp.Rational,
    "Symbol": sp.Symbol,
    "Function": sp.Function,
}

_FUNCTION_CLASSES = tuple(
    f for f in ALLOWED_FUNCTIONS.values() if isinstance(f, sp.FunctionClass)
)


def coordinate_symbol(name) -> sp.Symbol:
    """坐标名对应的 sympy 符号（全库统一，不带额外假设）"""
    return name if isinstance(name, sp.Symbol) else sp.Symbol(str(name))


def parse_expression(text: str, coordinates) -> sp.Expr:
    """
    把文本解析为 sympy 表达式

    参数：
    - text: 表达式文本
    - coordinates: 允许出现的坐标（名称或 Symbol 序列）

    异常：
    - ParameterError: 语法错误、未知函数、未知标识符或非整数指数
    """
    symbols = {str(c): coordinate_symbol(c) for c in coordinates}
    local_dict = {**ALLOWED_FUNCTIONS, **ALLOWED_CONSTANTS, **symbols}
    try:
        expr = parse_expr(
            str(text),
            local_dict=local_dict,
            global_dict=dict(_GLOBAL_DICT),
            transformations=_TRANSFORMATIONS,
        )
    except (SyntaxError, TypeError, ValueError, AttributeError, NameError) as e:
        raise ParameterError(f"无法解析表达式 '{text}': {e}")
    expr = sp.sympify(expr)
    check_vocabulary(expr, symbols.values(), source=text)
    return expr


def check_vocabulary(expr: sp.Expr, allowed_symbols, source: str = None):
    """检查表达式只使用允许的节点类型与坐标"""
    label = source if source is not None else str(expr)
    unknown = expr.free_symbols - set(allowed_symbols)
    if unknown:
        names = ", ".join(sorted(str(s) for s in unknown))
        raise ParameterError(f"表达式 '{label}' 含有未知标识符: {names}")
    undefined = expr.atoms(AppliedUndef)
    if undefined:
        names = ", ".join(sorted(str(f.func) for f in undefined))
        raise ParameterError(f"表达式 '{label}' 含有不支持的函数: {names}")
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.Function) and not isinstance(node, _FUNCTION_CLASSES):
            raise ParameterError(f"表达式 '{label}' 含有不支持的函数: {node.func}")
        if isinstance(node, sp.Pow):
            exponent = node.exp
            if not (exponent.is_Integer or (exponent.is_Rational and exponent.q == 2)):
                raise ParameterError(f"表达式 '{label}' 含有非整数指数: {exponent}")


def format_expression(expr: sp.Expr) -> str:
    """把表达式打印为语法文本（** 写作 ^）"""
    return sp.sstr(expr).replace("**", "^")


def exact_number(value) -> sp.Expr:
    """把 Python 数值转换为精确的 sympy 数（浮点按十进制文本转为有理数）"""
    if isinstance(value, sp.Basic):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParameterError(f"数值必须有限: {value}")
        return sp.Rational(repr(value))
    return sp.sympify(value)
