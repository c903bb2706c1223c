"""
族注册表：按 id 查找目录构造函数，并把命令行的 k=v 参数整理成构造函数的实参

带下标的参数：
- vector：b1 … bn → b = [b1, …, bn]
- diagonal：a11 … ann → a = [a11, …, ann]
- matrix：b11、b12 … → 对称矩阵（只给上三角即可）
下标只取一位数字（n ≤ 4）。
"""
import inspect
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List
from app.errors import ConfigError, ParameterError
from app.models.soliton import MetricInstance
from app.schemas.request import ParamSpec
from app.schemas.response import FamilyInfo
from app.services import catalog_service as catalog

logger = logging.getLogger(__name__)

_INDEXED = re.compile(r"^([A-Za-z]+?)(\d)(\d)?$")


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    builder: Callable[..., MetricInstance]
    kind: str
    summary: str
    source: str
    params: List[ParamSpec] = field(default_factory=list)

    def to_info(self) -> FamilyInfo:
        return FamilyInfo(
            name=self.name,
            kind=self.kind,
            summary=self.summary,
            source=self.source,
            params=list(self.params),
        )

    @property
    def signature(self) -> str:
        parts = []
        for spec in self.params:
            if spec.indexed == "vector":
                parts.append(f"{spec.name}1..{spec.name}n={spec.default}")
            elif spec.indexed == "diagonal":
                parts.append(f"{spec.name}11..{spec.name}nn={spec.default}")
            elif spec.indexed == "matrix":
                parts.append(f"{spec.name}ij={spec.default}")
            else:
                parts.append(f"{spec.name}={spec.default}")
        return ", ".join(parts)


def _p(name, kind, default, description, indexed=None, choices=None) -> ParamSpec:
    return ParamSpec(
        name=name,
        kind=kind,
        default=str(default),
        description=description,
        indexed=indexed,
        choices=choices,
    )


_N = _p("n", "int", 2, "横向维数（总维数 n + 2）")
_F0_INITIAL = [
    _p("u0", "number", 0, "f₀ 初值点"),
    _p("f0", "number", 0, "f₀(u₀)"),
    _p("df0", "number", 0, "f₀'(u₀)"),
]

FAMILIES: Dict[str, FamilyDescriptor] = {}


def register(descriptor: FamilyDescriptor) -> None:
    FAMILIES[descriptor.name] = descriptor


register(FamilyDescriptor(
    "minkowski_gaussian",
    catalog.minkowski_gaussian,
    "soliton",
    "Minkowski 空间上的 Gauss 孤立子 f = (λ/2)(−x1² + Σx_i²)",
    "Gauss 孤立子的洛伦兹类比：Hes_f = λg",
    [_p("dim", "int", 3, "维数"), _p("lam", "number", 1, "孤立子常数 λ")],
))
register(FamilyDescriptor(
    "cigar_2d",
    catalog.cigar_2d,
    "soliton",
    "二维稳定孤立子 −dt² + ω(t)²ds²（flat / tan / tanh 三种情形）",
    "二维稳定梯度孤立子：f' = κω，κωω' = ω''，以及完备性积分判据",
    [
        _p("case", "choice", "tanh", "情形", choices=["flat", "tan", "tanh"]),
        _p("a", "number", 1, "参数 a"),
        _p("b", "number", 0, "参数 b"),
        _p("r", "number", 1, "参数 r（tan/tanh 要求 r > 0）"),
        _p("d", "number", 0, "势函数的加性常数"),
    ],
))
register(FamilyDescriptor(
    "einstein_brinkmann",
    catalog.einstein_brinkmann,
    "soliton",
    "Einstein 情形（∇f 非类光）：I ×_{f'} N，f = (ελ/2)t² + at + b",
    "Einstein 梯度孤立子分类：翘曲积情形",
    [
        _p("eps", "number", 1, "ε = ±1"),
        _p("lam", "number", 1, "孤立子常数 λ"),
        _p("a", "number", 1, "f 的一次项系数"),
        _p("b", "number", 0, "f 的常数项"),
        _p("fiber_dim", "int", 2, "纤维维数"),
    ],
))
register(FamilyDescriptor(
    "einstein_null",
    catalog.einstein_null,
    "soliton",
    "Einstein 情形（∇f 类光）：2dudv + Σdx_i²，f = f(u)，f'' = 0",
    "Einstein 梯度孤立子分类：类光梯度情形",
    [_N, _p("f", "expr", "u", "势函数 f(u)（必须关于 u 线性）")],
))
register(FamilyDescriptor(
    "pp_wave",
    catalog.pp_wave,
    "structure",
    "pp-wave 度量 2dudv + H du² + Σdx_i²（只做结构检查）",
    "pp-wave 的联络、曲率与 Ricci 闭式",
    [_p("H", "expr", "x1^3", "剖面函数 H(u, x)"), _N],
))
register(FamilyDescriptor(
    "space_form",
    catalog.space_form,
    "structure",
    "常曲率 c 的洛伦兹空间形式（共形模型）",
    "曲率分解与 Kulkarni–Nomizu 积：常曲率空间",
    [_p("dim", "int", 3, "维数"), _p("c", "number", 1, "截面曲率 c")],
))
register(FamilyDescriptor(
    "pp_wave_soliton",
    catalog.pp_wave_soliton,
    "soliton",
    "一般 pp-wave 梯度孤立子 f = f₀(u) + Σκ_i x_i",
    "pp-wave 梯度孤立子的势函数方程：f₀'' = −ρ_uu − ½Σκ_i∂_iH",
    [_p("H", "expr", "x1^2+x2^2", "剖面函数 H(u, x)"), _N,
     _p("kappa", "number", 0, "κ_i", indexed="vector")] + _F0_INITIAL,
))
register(FamilyDescriptor(
    "plane_wave",
    catalog.plane_wave,
    "soliton",
    "平面波 H = Σa_ij(u)x_ix_j，f₀'' = Σa_ii",
    "平面波上的稳定梯度孤立子",
    [_N, _p("a", "expr", "δ_ij", "对称系数 a_ij(u)（缺省为单位矩阵）", indexed="matrix")] + _F0_INITIAL,
))
register(FamilyDescriptor(
    "cflat_pp_wave",
    catalog.cflat_pp_wave,
    "soliton",
    "局部共形平坦 pp-wave H = a(u)Σx_i² + Σb_i(u)x_i + c(u)，f₀'' = n·a",
    "局部共形平坦 pp-wave 上的梯度孤立子",
    [_N, _p("a", "expr", "1", "a(u)"), _p("b", "expr", "0", "b_i(u)", indexed="vector"),
     _p("c", "expr", "0", "c(u)")] + _F0_INITIAL,
))
register(FamilyDescriptor(
    "recurrent_type1",
    catalog.recurrent_type1,
    "soliton",
    "第一类递归 pp-wave：H = e^{κ1x1}h0/κ1² + h1 + x1h2，f = f₀(u) + κ1x1",
    "递归流形上的梯度孤立子（第一类）",
    [_N, _p("kappa1", "number", 1, "κ1 ≠ 0"), _p("h0", "expr", "1", "h0(u)"),
     _p("h1", "expr", "0", "h1(u)"), _p("h2", "expr", "0", "h2(u)")],
))
register(FamilyDescriptor(
    "recurrent_type2",
    catalog.recurrent_type2,
    "soliton",
    "第二类递归 pp-wave：H = a(u)Σb_ix_i²，f₀'' = a(u)Σb_i",
    "递归流形上的梯度孤立子（第二类）",
    [_N, _p("a", "expr", "u", "a(u)，a' 无零点"),
     _p("b", "number", "2,1", "b_i（|b1| ≥ … ≥ |bn|，b2 ≠ 0）", indexed="vector"),
     _p("kappa", "number", 0, "κ_i（b_i ≠ 0 处必须为 0）", indexed="vector")],
))
register(FamilyDescriptor(
    "two_symmetric",
    catalog.two_symmetric,
    "soliton",
    "二阶对称 pp-wave：H = Σ(a_ij u + b_ij)x_ix_j，a 对角",
    "二阶对称流形上的梯度孤立子",
    [_N, _p("a", "number", "1,2", "a_ii（非零且不减）", indexed="diagonal"),
     _p("b", "number", 0, "对称常数矩阵 b_ij", indexed="matrix")],
))
register(FamilyDescriptor(
    "conformally_symmetric",
    catalog.conformally_symmetric,
    "soliton",
    "共形对称 pp-wave：H = a(u)Σx_i² + Σb_ijx_ix_j，Σb_ii = 0",
    "共形对称流形上的梯度孤立子",
    [_N, _p("a", "expr", "u", "a(u)"),
     _p("b", "number", "diag(1,-1)", "对称无迹常数矩阵 b_ij", indexed="matrix")],
))
register(FamilyDescriptor(
    "cflat_soliton_vector",
    catalog.cflat_soliton_vector,
    "soliton",
    "局部共形平坦 pp-wave 上的非梯度 Ricci 孤立子",
    "非梯度孤立子：X = (p − Σq_i'x_i + 2λv)∂v + Σ(q_i + λx_i)∂i",
    [_N, _p("a", "expr", "1", "a(u)"), _p("b", "expr", "0", "b_i(u)", indexed="vector"),
     _p("c", "expr", "0", "c(u)"), _p("lam", "number", 1, "孤立子常数 λ"),
     _p("u0", "number", 0, "初值点"), _p("q0", "number", 0, "q_i(u₀)"),
     _p("dq0", "number", 0, "q_i'(u₀)"), _p("p0", "number", 0, "p(u₀)")],
))
register(FamilyDescriptor(
    "warped_rw",
    catalog.warped_rw,
    "soliton",
    "翘曲积 εdt² + ψ(t)²g_N，纤维为常曲率 c 的空间",
    "非 Einstein 孤立子分类中的翘曲积形式与径向方程",
    [
        _p("eps", "number", -1, "ε = ±1"),
        _p("psi", "expr", "sqrt(2)*tanh(t/sqrt(2))", "翘曲函数 ψ(t)"),
        _p("c", "number", 0, "纤维曲率 c"),
        _p("fiber_dim", "int", 1, "纤维维数"),
        _p("f", "expr", "-2*log(cosh(t/sqrt(2)))", "势函数 f(t)"),
        _p("lam", "number", 0, "孤立子常数 λ"),
        _p("t_min", "number", "auto", "t 区间下端（缺省自动避开 ψ 的零点）"),
        _p("t_max", "number", "auto", "t 区间上端"),
    ],
))


def list_families() -> List[FamilyDescriptor]:
    return [FAMILIES[name] for name in sorted(FAMILIES)]


def get_family(name: str) -> FamilyDescriptor:
    """
    按 id 查找族

    异常：
    - ConfigError: 未知的族
    """
    if name not in FAMILIES:
        raise ConfigError(f"未知的族: {name}（可用: {', '.join(sorted(FAMILIES))}）")
    return FAMILIES[name]


def _collect_indexed(spec: ParamSpec, entries: Dict[tuple, str], n: int):
    if spec.indexed in ("vector", "diagonal"):
        values = [None] * n
        for (i, j), value in entries.items():
            if spec.indexed == "diagonal" and j != i:
                raise ParameterError(f"{spec.name} 只接受对角项 {spec.name}{i}{i}，收到 {spec.name}{i}{j}")
            if spec.indexed == "vector" and j is not None:
                raise ConfigError(f"{spec.name} 只接受一个下标，收到 {spec.name}{i}{j}")
            if not 1 <= i <= n:
                raise ParameterError(f"{spec.name}{i} 的下标超出 1..{n}")
            values[i - 1] = value
        return values
    matrix = [[0] * n for _ in range(n)]
    for (i, j), value in entries.items():
        if j is None:
            raise ConfigError(f"{spec.name} 需要两个下标，收到 {spec.name}{i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParameterError(f"{spec.name}{i}{j} 的下标超出 1..{n}")
        matrix[i - 1][j - 1] = value
    return matrix


def build_kwargs(descriptor: FamilyDescriptor, raw: Dict[str, str]) -> dict:
    """
    把 k=v 参数整理成构造函数的关键字参数（未给出的参数使用构造函数缺省值）

    异常：
    - ConfigError: 参数名不属于该族
    """
    plain = {spec.name: spec for spec in descriptor.params if spec.indexed is None}
    indexed = {spec.name: spec for spec in descriptor.params if spec.indexed is not None}
    kwargs = {}
    grouped: Dict[str, Dict[tuple, str]] = {}
    for key, value in raw.items():
        if key in plain:
            spec = plain[key]
            if spec.kind == "choice" and value not in spec.choices:
                raise ConfigError(f"参数 {key} 只能取 {', '.join(spec.choices)}，收到 {value}")
            kwargs[key] = value
            continue
        match = _INDEXED.match(key)
        if match and match.group(1) in indexed:
            first = int(match.group(2))
            second = int(match.group(3)) if match.group(3) else None
            grouped.setdefault(match.group(1), {})[(first, second)] = value
            continue
        accepted = ", ".join(spec.name for spec in descriptor.params)
        raise ConfigError(f"族 {descriptor.name} 不接受参数 '{key}'（可用: {accepted}）")

    if grouped:
        raw_n = kwargs.get("n", plain["n"].default if "n" in plain else 2)
        try:
            n = int(raw_n)
        except (TypeError, ValueError):
            raise ParameterError(f"参数 n 必须是整数: {raw_n}")
        for name, entries in grouped.items():
            values = _collect_indexed(indexed[name], entries, n)
            if indexed[name].indexed in ("vector", "diagonal"):
                default = _vector_default(descriptor.builder, name, n)
                values = [d if v is None else v for v, d in zip(values, default)]
            kwargs[name] = values
    return kwargs


def _vector_default(builder, name: str, n: int) -> list:
    """未给出的分量沿用构造函数缺省值（缺省值不够长时补 0）"""
    default = inspect.signature(builder).parameters[name].default
    default = list(default) if isinstance(default, (list, tuple)) else []
    return (default + [0] * n)[:n]


def build_instance(name: str, raw: Dict[str, str] = None) -> MetricInstance:
    """
    按族 id 与 k=v 参数构造实例

    异常：
    - ConfigError: 未知族或未知参数
    - ParameterError / XDependentRHS: 参数违反族约束
    """
    descriptor = get_family(name)
    kwargs = build_kwargs(descriptor, raw or {})
    logger.info(f"构造实例: {name}({', '.join(f'{k}={v}' for k, v in sorted(raw.items())) if raw else ''})")
    return descriptor.builder(**kwargs)
