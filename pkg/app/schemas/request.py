from typing import Any, Dict, List, Literal, Optional
import sympy as sp
from pydantic import BaseModel, Field, field_validator, model_validator
from app.config import settings
from app.errors import ConfigError
from app.models.geometry import Chart, MetricField, Signature, TensorField
from app.models.soliton import MetricInstance, SolitonInstance
from app.utils.expression import format_expression, parse_expression
from app.utils.validation import CHECK_NAMES, OUTPUT_FORMATS


class ParamSpec(BaseModel):
    """族参数说明"""
    name: str = Field(..., description="参数名（带下标的参数写作 b1、a12 等）")
    kind: Literal["int", "number", "expr", "choice"] = Field(..., description="取值类型")
    default: str = Field(..., description="缺省值（文本形式）")
    description: str = Field("", description="参数含义")
    indexed: Optional[Literal["vector", "diagonal", "matrix"]] = Field(
        None, description="带下标的参数：vector 写作 b1…bn，diagonal 写作 a11…ann，matrix 写作 bij"
    )
    choices: Optional[List[str]] = Field(None, description="kind=choice 时的可选值")


class RunConfig(BaseModel):
    """一次 verify 运行的完整配置（同一配置与种子给出逐字节相同的报告）"""
    family: Optional[str] = Field(None, description="族 id（与 metric_path 二选一）")
    metric_path: Optional[str] = Field(None, description="度量描述文件路径")
    params: Dict[str, str] = Field(default_factory=dict, description="族参数")
    points: int = Field(settings.DEFAULT_POINTS, ge=1, le=100000, description="采样点数")
    seed: int = Field(settings.DEFAULT_SEED, ge=0, description="随机种子")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="按检查名覆盖容差")
    format: Literal["json", "csv", "text"] = Field("json", description="输出格式")
    checks: Optional[List[str]] = Field(None, description="要运行的检查（缺省为全部适用检查）")
    lam: Optional[str] = Field(None, description="覆盖孤立子常数 λ")
    out: Optional[str] = Field(None, description="输出文件路径（缺省写到标准输出）")

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value):
        if value is None:
            return value
        unknown = [name for name in value if name not in CHECK_NAMES]
        if unknown:
            raise ValueError(f"未知的检查: {', '.join(unknown)}")
        return value

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value):
        for name, tol in value.items():
            if name not in CHECK_NAMES:
                raise ValueError(f"未知的检查: {name}")
            if not tol > 0:
                raise ValueError(f"{name} 的容差必须为正")
        return value

    @field_validator("format")
    @classmethod
    def _known_format(cls, value):
        if value not in OUTPUT_FORMATS:
            raise ValueError(f"未知的输出格式: {value}")
        return value

    @model_validator(mode="after")
    def _one_source(self):
        if (self.family is None) == (self.metric_path is None):
            raise ValueError("必须且只能指定族 id 或度量描述文件之一")
        return self


class MetricDescriptor(BaseModel):
    """
    度量描述文件：坐标、采样盒、度量分量与可选的势函数 / 向量场

    所有表达式按表达式语法书写；打印后再解析得到同一表达式。
    """
    family: str = Field("custom", description="实例名")
    coordinates: List[str] = Field(..., min_length=2, description="坐标名")
    box: Optional[List[List[float]]] = Field(None, description="每个坐标的采样区间 [lo, hi]")
    components: List[List[str]] = Field(..., description="度量矩阵（逐行）")
    signature: Literal["lorentzian", "riemannian"] = Field("lorentzian", description="号差")
    potential: Optional[str] = Field(None, description="势函数 f")
    vector_field: Optional[List[str]] = Field(None, description="孤立子向量场 X 的逆变分量")
    lam: str = Field("0", description="孤立子常数 λ")
    expectations: Dict[str, Any] = Field(default_factory=dict, description="声明的结构性质（布尔、字符串或数）")

    @field_validator("expectations")
    @classmethod
    def _plain_expectations(cls, value):
        for key, item in value.items():
            if not isinstance(item, (bool, int, float, str)):
                raise ValueError(f"expectations.{key} 只能是布尔、数或字符串")
        return value

    def to_instance(self) -> MetricInstance:
        """
        构造实例：给出势函数或向量场时返回 SolitonInstance，否则返回 MetricInstance

        异常：
        - ConfigError: 形状不一致
        - ParameterError: 表达式无法解析
        """
        dim = len(self.coordinates)
        box = self.box or [[-settings.BOX_HALF_WIDTH, settings.BOX_HALF_WIDTH]] * dim
        if len(self.components) != dim or any(len(row) != dim for row in self.components):
            raise ConfigError(f"度量矩阵必须是 {dim}×{dim}")
        if len(box) != dim or any(len(pair) != 2 for pair in box):
            raise ConfigError("采样盒必须为每个坐标给出 [lo, hi]")
        try:
            chart = Chart(tuple(self.coordinates), tuple(tuple(pair) for pair in box))
            matrix = sp.Matrix(dim, dim, lambda a, b: parse_expression(self.components[a][b], chart.symbols))
            metric = MetricField(chart, matrix, Signature(self.signature))
        except ValueError as e:
            raise ConfigError(str(e))
        expectations = dict(self.expectations)
        if self.potential is None and self.vector_field is None:
            return MetricInstance(self.family, metric, {}, expectations)
        lam = parse_expression(self.lam, [])
        if self.vector_field is not None:
            if len(self.vector_field) != dim:
                raise ConfigError(f"向量场必须有 {dim} 个分量")
            if self.potential is not None:
                raise ConfigError("势函数与向量场只能给出一个")
            X = TensorField.vector(chart, list(self.vector_field))
            return SolitonInstance(self.family, metric, {}, expectations, vector_field=X, lam=lam)
        return SolitonInstance(self.family, metric, {}, expectations, potential=self.potential, lam=lam)

    @classmethod
    def from_instance(cls, inst: MetricInstance) -> "MetricDescriptor":
        """
        把实例写成描述文件（含 ODE 数值解节点的实例无法写出）

        异常：
        - ConfigError: 实例含有表格函数节点或非简单的结构声明
        """
        if inst.ode_fed:
            raise ConfigError(f"{inst.instance_id} 含有 ODE 数值解，不能写成描述文件")
        g = inst.metric
        dim = g.dimension
        data = {
            "family": inst.family,
            "coordinates": list(g.chart.coordinates),
            "box": [list(pair) for pair in g.chart.box],
            "components": [[format_expression(g.components[a, b]) for b in range(dim)] for a in range(dim)],
            "signature": g.signature.value,
            "expectations": {
                k: v for k, v in inst.expectations.items() if isinstance(v, (bool, str))
            },
        }
        if isinstance(inst, SolitonInstance):
            data["lam"] = format_expression(inst.lam)
            if inst.is_gradient:
                data["potential"] = inst.potential.to_text()
            else:
                data["vector_field"] = [format_expression(e) for e in inst.vector_field.components]
        return cls(**data)
