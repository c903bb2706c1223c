from dataclasses import dataclass, field, replace
from typing import Optional
import sympy as sp
from app.config import settings
from app.models.geometry import Chart, MetricField, TensorField
from app.models.scalar_field import ScalarField
from app.utils.expression import exact_number, format_expression


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """
    目录族构造出的度量实例（只做结构检查的族直接使用本类）

    字段：
    - family: 族 id
    - metric: 度量场（采样盒随坐标卡携带）
    - params: 构造参数（用于报告与复现）
    - expectations: 族声明的结构性质，决定哪些检查适用，例如
      {"lcf": True, "pp_wave": True, "causal": "null", "isotropic": True}
    - ode_fed: 是否含 ODE 数值解（决定容差档位）
    - null_dead_band: 判定零向量的死区（因果类型与零向量检查共用）
    """
    family: str
    metric: MetricField
    params: dict = field(default_factory=dict)
    expectations: dict = field(default_factory=dict)
    ode_fed: bool = False
    null_dead_band: float = settings.NULL_DEAD_BAND

    @property
    def chart(self) -> Chart:
        return self.metric.chart

    @property
    def box(self) -> tuple:
        return self.chart.box

    @property
    def instance_id(self) -> str:
        if not self.params:
            return self.family
        args = ",".join(f"{k}={format_param(v)}" for k, v in sorted(self.params.items()))
        return f"{self.family}({args})"

    @property
    def is_gradient(self) -> bool:
        return False

    @property
    def is_soliton(self) -> bool:
        return False

    def expects(self, key: str, default=None):
        return self.expectations.get(key, default)


@dataclass(frozen=True, eq=False)
class SolitonInstance(MetricInstance):
    """
    Ricci 孤立子实例：(M, g, f) 或 (M, g, X)，以及孤立子常数 λ

    potential 与 vector_field 恰好给出一个。
    """
    potential: Optional[ScalarField] = None
    vector_field: Optional[TensorField] = None
    lam: sp.Expr = sp.Integer(0)
    solutions: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.potential is None) == (self.vector_field is None):
            raise ValueError("势函数与向量场必须恰好给出一个")
        lam = exact_number(self.lam)
        if not lam.is_number or not lam.is_finite:
            raise ValueError(f"孤立子常数必须是有限实数: {self.lam}")
        object.__setattr__(self, "lam", lam)
        if self.potential is not None:
            object.__setattr__(self, "potential", self.chart.scalar(self.potential))
        if self.vector_field is not None:
            if self.vector_field.index_types != ("u",):
                raise ValueError("孤立子向量场必须是逆变向量")
            if self.vector_field.chart.coordinates != self.chart.coordinates:
                raise ValueError("向量场与度量不在同一坐标卡上")

    @property
    def is_gradient(self) -> bool:
        return self.potential is not None

    @property
    def is_soliton(self) -> bool:
        return True

    @property
    def classification(self) -> str:
        """λ>0 收缩、λ=0 稳定、λ<0 扩张"""
        if self.lam > 0:
            return "shrinking"
        if self.lam < 0:
            return "expanding"
        return "steady"

    def with_lambda(self, lam) -> "SolitonInstance":
        """替换孤立子常数（势函数不变，常用于构造反例）"""
        return replace(self, lam=exact_number(lam))


def format_param(value) -> str:
    if isinstance(value, ScalarField):
        return value.to_text()
    if isinstance(value, sp.Basic):
        return format_expression(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(format_param(v) for v in value) + "]"
    return str(value)
