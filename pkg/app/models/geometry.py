"""
坐标卡、度量场与张量场（几何层的不可变值对象）

约定：
- 张量分量以稠密 numpy object 数组存放 sympy 表达式，维数实际不超过 6
- 曲率类张量默认全协变存放，升指标版本按需派生
- index_types 中 'l' 表示协变（下）指标，'u' 表示逆变（上）指标
"""
import enum
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence
import numpy as np
import sympy as sp
from app.errors import DegenerateMetric, DomainError
from app.models.scalar_field import ScalarField
from app.utils.expression import coordinate_symbol


class Signature(str, enum.Enum):
    RIEMANNIAN = "riemannian"
    LORENTZIAN = "lorentzian"

    @property
    def negative_count(self) -> int:
        return 0 if self is Signature.RIEMANNIAN else 1


@dataclass(frozen=True)
class Chart:
    coordinates: tuple
    box: tuple

    def __post_init__(self):
        names = tuple(str(c) for c in self.coordinates)
        object.__setattr__(self, "coordinates", names)
        object.__setattr__(self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box))
        if len(names) < 2:
            raise ValueError("坐标卡维数至少为 2")
        if len(set(names)) != len(names):
            raise ValueError(f"坐标名重复: {names}")
        if len(self.box) != len(names):
            raise ValueError("采样盒的区间数必须等于维数")
        for name, (lo, hi) in zip(names, self.box):
            if not lo < hi:
                raise ValueError(f"坐标 {name} 的采样区间为空: [{lo}, {hi}]")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def n(self) -> int:
        """公式中使用的 n = 维数 - 2"""
        return self.dimension - 2

    @cached_property
    def symbols(self) -> tuple:
        return tuple(coordinate_symbol(c) for c in self.coordinates)

    def index(self, name: str) -> int:
        return self.coordinates.index(str(name))

    def interval(self, name: str) -> tuple:
        return self.box[self.index(name)]

    def scalar(self, value) -> ScalarField:
        """在本坐标卡上构造标量场（文本按表达式语法解析）"""
        if isinstance(value, ScalarField):
            return ScalarField(value.expr, self.symbols)
        if isinstance(value, str):
            return ScalarField.parse(value, self.symbols)
        return ScalarField(sp.sympify(value), self.symbols)


def _compile(symbols, expressions) -> Callable:
    return sp.lambdify(symbols, list(expressions), modules="math")


def _evaluate_many(compiled, point, label: str) -> list:
    try:
        values = compiled(*point)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise DomainError(f"{label} 在 {tuple(point)} 处求值失败: {e}")
    result = []
    for value in values:
        if isinstance(value, complex) or not math.isfinite(value):
            raise DomainError(f"{label} 在 {tuple(point)} 处没有有限实值")
        result.append(float(value))
    return result


@dataclass(frozen=True, eq=False)
class TensorField:
    chart: Chart
    index_types: tuple
    components: np.ndarray

    def __post_init__(self):
        index_types = tuple(self.index_types)
        object.__setattr__(self, "index_types", index_types)
        if any(t not in ("l", "u") for t in index_types):
            raise ValueError(f"非法指标类型: {index_types}")
        array = np.asarray(self.components, dtype=object)
        expected = (self.chart.dimension,) * len(index_types)
        if array.shape != expected:
            raise ValueError(f"分量形状 {array.shape} 与期望 {expected} 不一致")
        object.__setattr__(self, "components", array)

    # ---- 构造 ----

    @classmethod
    def zeros(cls, chart: Chart, index_types) -> "TensorField":
        shape = (chart.dimension,) * len(tuple(index_types))
        array = np.empty(shape, dtype=object)
        array.fill(sp.Integer(0))
        return cls(chart, tuple(index_types), array)

    @classmethod
    def from_function(cls, chart: Chart, index_types, fn) -> "TensorField":
        """fn(*indices) -> 表达式（sympy 表达式、数或 ScalarField）"""
        index_types = tuple(index_types)
        shape = (chart.dimension,) * len(index_types)
        array = np.empty(shape, dtype=object)
        for idx in itertools.product(range(chart.dimension), repeat=len(index_types)):
            value = fn(*idx)
            array[idx] = value.expr if isinstance(value, ScalarField) else sp.sympify(value)
        return cls(chart, index_types, array)

    @classmethod
    def vector(cls, chart: Chart, components) -> "TensorField":
        return cls.from_function(chart, ("u",), lambda a: chart.scalar(components[a]))

    # ---- 属性 ----

    @property
    def rank(self) -> int:
        return len(self.index_types)

    def component(self, *indices) -> ScalarField:
        return ScalarField(self.components[tuple(indices)], self.chart.symbols)

    @cached_property
    def nonzero_indices(self) -> tuple:
        return tuple(
            idx for idx in itertools.product(range(self.chart.dimension), repeat=self.rank)
            if self.components[idx] != 0
        )

    @property
    def is_structurally_zero(self) -> bool:
        return not self.nonzero_indices

    # ---- 求值 ----

    @cached_property
    def _compiled(self) -> Callable:
        return _compile(self.chart.symbols, [self.components[i] for i in self.nonzero_indices])

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        """在一点求全部分量的数值（结构零分量不参与编译）"""
        result = np.zeros((self.chart.dimension,) * self.rank, dtype=float)
        if not self.nonzero_indices:
            return result
        values = _evaluate_many(
            self._compiled,
            tuple(float(v) for v in point),
            f"{self.rank} 阶张量场",
        )
        for idx, value in zip(self.nonzero_indices, values):
            result[idx] = value
        return result

    # ---- 代数运算 ----

    def _check_compatible(self, other: "TensorField"):
        if other.chart.coordinates != self.chart.coordinates or other.index_types != self.index_types:
            raise ValueError("张量场的坐标卡或指标类型不一致")

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.chart, self.index_types, self.components + other.components)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.chart, self.index_types, self.components - other.components)

    def __neg__(self) -> "TensorField":
        return TensorField(self.chart, self.index_types, -self.components)

    def scale(self, factor) -> "TensorField":
        """乘以标量（数、sympy 表达式或 ScalarField）"""
        factor = factor.expr if isinstance(factor, ScalarField) else sp.sympify(factor)
        return TensorField(self.chart, self.index_types, self.components * factor)

    def transpose(self, *order) -> "TensorField":
        """按给定顺序重排指标槽位"""
        return TensorField(
            self.chart,
            tuple(self.index_types[i] for i in order),
            np.transpose(self.components, order),
        )


@dataclass(frozen=True, eq=False)
class MetricField:
    chart: Chart
    components: sp.ImmutableMatrix
    signature: Signature = Signature.LORENTZIAN

    def __post_init__(self):
        matrix = sp.ImmutableMatrix(self.components)
        dim = self.chart.dimension
        if matrix.shape != (dim, dim):
            raise ValueError(f"度量矩阵形状 {matrix.shape} 与维数 {dim} 不一致")
        for a in range(dim):
            for b in range(a + 1, dim):
                if sp.expand(matrix[a, b] - matrix[b, a]) != 0:
                    raise ValueError(f"度量不对称: g[{a},{b}] != g[{b},{a}]")
        object.__setattr__(self, "components", matrix)
        object.__setattr__(self, "signature", Signature(self.signature))

    @property
    def dimension(self) -> int:
        return self.chart.dimension

    def entry(self, a: int, b: int) -> ScalarField:
        return ScalarField(self.components[a, b], self.chart.symbols)

    def as_tensor(self) -> TensorField:
        return TensorField.from_function(self.chart, ("l", "l"), lambda a, b: self.components[a, b])

    @cached_property
    def inverse_components(self) -> sp.ImmutableMatrix:
        """符号逆矩阵 g^ab（行列式恒为零时抛出 DegenerateMetric）"""
        det = self.components.det(method="berkowitz")
        if sp.expand(det) == 0:
            raise DegenerateMetric("度量行列式恒为零")
        return sp.ImmutableMatrix(self.components.inv(method="LU"))

    @cached_property
    def _compiled(self) -> Callable:
        return _compile(self.chart.symbols, list(self.components))

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        values = _evaluate_many(self._compiled, tuple(float(v) for v in point), "度量")
        dim = self.dimension
        return np.array(values, dtype=float).reshape(dim, dim)
