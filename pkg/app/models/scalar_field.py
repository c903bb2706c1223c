"""
标量场（jet 引擎）

ScalarField 是坐标卡上闭式实值函数的不可变包装：
- 表达式树由 sympy 承载，节点类型为常量、坐标、取负、和、积、商、整数幂、
  exp log sqrt sin cos tan sinh cosh tanh，以及 ODE 数值解对应的“表格函数”节点
- 求导精确（符号微分），可任意阶重复
- 求值通过 lambdify(math) 编译后执行，定义域外求值抛出 DomainError

表格函数节点：值与一阶导数来自 ODE 数值解的三次 Hermite 插值，
二阶导数等于 ODE 右端项（仍然是本词汇表内的表达式），因此求导封闭。
"""
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Union
import sympy as sp
from app.errors import DomainError
from app.utils.expression import (
    ALLOWED_FUNCTIONS,
    coordinate_symbol,
    exact_number,
    format_expression,
    parse_expression,
)

_tabulated_counter = itertools.count(1)

Coordinate = Union[str, sp.Symbol]


@dataclass(frozen=True)
class ScalarField:
    expr: sp.Expr
    coordinates: tuple

    def __post_init__(self):
        object.__setattr__(self, "expr", sp.sympify(self.expr))
        object.__setattr__(
            self, "coordinates", tuple(coordinate_symbol(c) for c in self.coordinates)
        )
        stray = self.expr.free_symbols - set(self.coordinates)
        if stray:
            raise ValueError(f"表达式含有坐标卡以外的符号: {sorted(map(str, stray))}")

    # ---- 构造 ----

    @classmethod
    def coordinate(cls, name: Coordinate, coordinates) -> "ScalarField":
        symbol = coordinate_symbol(name)
        if symbol not in tuple(coordinate_symbol(c) for c in coordinates):
            raise ValueError(f"坐标 {symbol} 不属于坐标卡")
        return cls(symbol, coordinates)

    @classmethod
    def parse(cls, text: str, coordinates) -> "ScalarField":
        return cls(parse_expression(text, coordinates), coordinates)

    # ---- 基本属性 ----

    @property
    def names(self) -> tuple:
        return tuple(str(c) for c in self.coordinates)

    @property
    def is_zero(self) -> bool:
        """结构上为 0（只做字面常量折叠，不做化简）"""
        return self.expr == 0

    def mentions(self, coordinate: Coordinate) -> bool:
        return coordinate_symbol(coordinate) in self.expr.free_symbols

    def to_text(self) -> str:
        return format_expression(self.expr)

    def __str__(self):
        return self.to_text()

    # ---- 求导与求值 ----

    def partial(self, coordinate: Coordinate, order: int = 1) -> "ScalarField":
        symbol = coordinate_symbol(coordinate)
        if symbol not in self.coordinates:
            raise ValueError(f"坐标 {symbol} 不属于坐标卡 {self.names}")
        return ScalarField(sp.diff(self.expr, symbol, order), self.coordinates)

    @cached_property
    def _compiled(self) -> Callable:
        return sp.lambdify(self.coordinates, self.expr, modules="math")

    def evaluate(self, point: Sequence[float]) -> float:
        values = tuple(float(v) for v in point)
        if len(values) != len(self.coordinates):
            raise ValueError(f"点的维数 {len(values)} 与坐标卡维数 {len(self.coordinates)} 不一致")
        try:
            result = self._compiled(*values)
        except (ValueError, ZeroDivisionError, OverflowError) as e:
            raise DomainError(f"'{self.to_text()}' 在 {values} 处求值失败: {e}")
        if isinstance(result, complex) or not math.isfinite(result):
            raise DomainError(f"'{self.to_text()}' 在 {values} 处没有有限实值")
        return float(result)

    # ---- 代数运算 ----

    def _lift(self, other) -> sp.Expr:
        if isinstance(other, ScalarField):
            if other.coordinates != self.coordinates:
                raise ValueError("两个标量场属于不同的坐标卡")
            return other.expr
        return sp.sympify(other)

    def __add__(self, other):
        return ScalarField(self.expr + self._lift(other), self.coordinates)

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.expr - self._lift(other), self.coordinates)

    def __rsub__(self, other):
        return ScalarField(self._lift(other) - self.expr, self.coordinates)

    def __mul__(self, other):
        return ScalarField(self.expr * self._lift(other), self.coordinates)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarField(self.expr / self._lift(other), self.coordinates)

    def __rtruediv__(self, other):
        return ScalarField(self._lift(other) / self.expr, self.coordinates)

    def __neg__(self):
        return ScalarField(-self.expr, self.coordinates)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise ValueError("只支持整数次幂")
        return ScalarField(self.expr ** exponent, self.coordinates)


def evaluate(field: ScalarField, point: Sequence[float]) -> float:
    return field.evaluate(point)


def partial(field: ScalarField, coordinate: Coordinate) -> ScalarField:
    return field.partial(coordinate)


def apply(function_name: str, field: ScalarField) -> ScalarField:
    """对标量场施加词汇表中的单参数函数"""
    if function_name not in ALLOWED_FUNCTIONS:
        raise ValueError(f"不支持的函数: {function_name}")
    return ScalarField(ALLOWED_FUNCTIONS[function_name](field.expr), field.coordinates)


def tabulated(
    name: str,
    variable: Coordinate,
    value: Callable[[float], float],
    slope: Callable[[float], float],
):
    """
    构造一个表格函数节点对（F, F'）

    参数：
    - name: 节点名前缀（会追加序号保证唯一）
    - variable: 自变量坐标（通常是 u）
    - value / slope: 数值插值得到的函数值与一阶导数

    返回：
    - (value_node, bind_second)：value_node 是 sympy 表达式 F(u)；
      bind_second(expr) 用来登记 F'' 的闭式表达式（可以引用 F 本身），
      必须在对 F 求二阶导之前调用
    """
    symbol = coordinate_symbol(variable)
    tag = f"{name}_{next(_tabulated_counter)}"
    state = {"second": None}

    def _slope_fdiff(self, argindex=1):
        if state["second"] is None:
            raise RuntimeError(f"表格函数 {tag} 的二阶导数尚未登记")
        return state["second"].xreplace({symbol: self.args[0]})

    slope_cls = type(
        f"{tag}_d",
        (sp.Function,),
        {"nargs": 1, "_imp_": staticmethod(slope), "fdiff": _slope_fdiff},
    )

    def _value_fdiff(self, argindex=1):
        return slope_cls(self.args[0])

    value_cls = type(
        tag,
        (sp.Function,),
        {"nargs": 1, "_imp_": staticmethod(value), "fdiff": _value_fdiff},
    )

    def bind_second(expr):
        state["second"] = sp.sympify(expr.expr if isinstance(expr, ScalarField) else expr)

    return value_cls(symbol), bind_second
