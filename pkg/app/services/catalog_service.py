"""
度量族目录：每个构造函数返回可直接验证的实例

坐标卡约定：
- pp-wave 类：(u, v, x1, …, xn)，度量 2dudv + H du² + Σdx_i²
- 平坦 / 常曲率：(x1, …, xd)，η = diag(−1, 1, …, 1)
- 二维 cigar：(t, s)，度量 −dt² + ω(t)² ds²
- 翘曲积：(t, y1, …, yk)，度量 εdt² + ψ(t)² g_N，g_N 取常曲率共形模型

采样盒默认每个坐标 [−2, 2]，遇到奇异点（ω、ψ 的零点，tan 的极点，共形模型的奇异二次曲面）
自动收缩并保留 BOX_MARGIN 余量。
"""
import logging
import math
from typing import Optional, Sequence
import numpy as np
import sympy as sp
from app.config import settings
from app.errors import ParameterError
from app.models.geometry import Chart, MetricField, TensorField
from app.models.scalar_field import ScalarField
from app.models.soliton import MetricInstance, SolitonInstance
from app.services import analysis_service as analysis
from app.services import curvature_service as curvature
from app.utils.expression import exact_number, parse_expression
from app.utils.sampling import conformal_half_width, default_interval, shrink_interval

logger = logging.getLogger(__name__)

MAX_TRANSVERSE = 4

SQRT2 = sp.sqrt(2)
HALF = sp.Rational(1, 2)


# ---- 参数工具 ----

def _number(value, name: str) -> sp.Expr:
    """把参数转换为精确实数（文本按表达式语法解析，不允许坐标）"""
    if isinstance(value, str):
        value = parse_expression(value, [])
    value = exact_number(value)
    if not value.is_number or not value.is_finite or not value.is_real:
        raise ParameterError(f"参数 {name} 必须是有限实数: {value}")
    return value


def _count(value, name: str, minimum: int, maximum: int = MAX_TRANSVERSE) -> int:
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"参数 {name} 必须是整数: {value}")
    if not minimum <= count <= maximum:
        raise ParameterError(f"参数 {name} 必须在 [{minimum}, {maximum}] 内: {count}")
    return count


def _u_field(chart: Chart, value, name: str) -> ScalarField:
    """只依赖 u 的系数函数"""
    field = chart.scalar(value)
    extra = field.expr.free_symbols - {sp.Symbol("u")}
    if extra:
        raise ParameterError(f"系数 {name} 只能依赖 u，实际含有 {sorted(map(str, extra))}")
    return field


def _vector_param(values, n: int, name: str, default=0) -> list:
    values = list(values) if values is not None else []
    if len(values) > n:
        raise ParameterError(f"参数 {name} 给出了 {len(values)} 个分量，超过 n = {n}")
    return values + [default] * (n - len(values))


def _matrix_param(values, n: int, name: str) -> list:
    """n×n 对称系数矩阵；缺省项为 0，只给出上三角时自动对称化"""
    matrix = [[0] * n for _ in range(n)]
    if values is None:
        return matrix
    rows = list(values)
    if len(rows) > n or any(len(row) > n for row in rows):
        raise ParameterError(f"参数 {name} 的形状超过 {n}×{n}")
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            matrix[i][j] = entry
    return matrix


def _symmetric(chart: Chart, matrix: list, name: str, coefficient=_u_field) -> list:
    n = len(matrix)
    result = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            upper = coefficient(chart, matrix[i][j], f"{name}{i + 1}{j + 1}").expr
            lower = coefficient(chart, matrix[j][i], f"{name}{j + 1}{i + 1}").expr
            if lower != 0 and upper != 0 and sp.simplify(upper - lower) != 0:
                raise ParameterError(f"系数矩阵 {name} 不对称: [{i + 1},{j + 1}]")
            value = upper if upper != 0 else lower
            result[i][j] = result[j][i] = value
    return result


def _constant(chart: Chart, value, name: str) -> ScalarField:
    return ScalarField(_number(value, name), chart.symbols)


# ---- 坐标卡与度量 ----

def _pp_chart(n: int, box=None) -> Chart:
    names = ("u", "v") + tuple(f"x{i + 1}" for i in range(n))
    return Chart(names, box or (default_interval(),) * len(names))


def _pp_metric(chart: Chart, H: sp.Expr) -> MetricField:
    dim = chart.dimension
    matrix = sp.zeros(dim, dim)
    matrix[0, 0] = H
    matrix[0, 1] = matrix[1, 0] = 1
    for i in range(2, dim):
        matrix[i, i] = 1
    return MetricField(chart, matrix)


def _conformal_factor(symbols: Sequence, c, lorentzian: bool) -> tuple:
    """(1 + (c/4)η(x,x))^{-2} 以及 η 的对角元"""
    diagonal = [-1 if lorentzian and k == 0 else 1 for k in range(len(symbols))]
    quadric = sp.Add(*(e * s ** 2 for e, s in zip(diagonal, symbols)))
    return (1 + sp.Rational(1, 4) * c * quadric) ** -2, diagonal


def transverse_hessian(H: ScalarField, chart: Chart) -> list:
    xs = chart.symbols[2:]
    return [[sp.diff(H.expr, a, b) for b in xs] for a in xs]


def is_cflat(H: ScalarField, chart: Chart) -> bool:
    """
    pp-wave 局部共形平坦的判据：横向 Hessian 是只依赖 u 的单位矩阵倍数，
    即 H = a(u)Σx_i² + Σb_i(u)x_i + c(u)
    """
    hess = transverse_hessian(H, chart)
    n = len(hess)
    xs = set(chart.symbols[1:])
    for i in range(n):
        for j in range(n):
            if i != j and sp.simplify(hess[i][j]) != 0:
                return False
        if sp.simplify(hess[i][i] - hess[0][0]) != 0:
            return False
    return not (sp.simplify(hess[0][0]).free_symbols & xs)


def is_ricci_flat_profile(H: ScalarField, chart: Chart) -> bool:
    hess = transverse_hessian(H, chart)
    return sp.simplify(sp.Add(*(hess[i][i] for i in range(len(hess))))) == 0


def _null_direction(chart: Chart, components) -> TensorField:
    return TensorField.vector(chart, components)


# ---- 平坦与常曲率 ----

def minkowski_gaussian(dim: int = 3, lam=1) -> SolitonInstance:
    """
    Minkowski 空间上的 Gauss 孤立子：f = (λ/2)(−x1² + Σx_i²)，Hes_f = λg，对任意 λ 成立
    """
    dim = _count(dim, "dim", 2, MAX_TRANSVERSE + 2)
    lam = _number(lam, "lam")
    chart = Chart(tuple(f"x{i + 1}" for i in range(dim)), (default_interval(),) * dim)
    metric = MetricField(chart, sp.diag(-1, *([1] * (dim - 1))))
    xs = chart.symbols
    potential = lam / 2 * (-xs[0] ** 2 + sp.Add(*(x ** 2 for x in xs[1:])))
    return SolitonInstance(
        family="minkowski_gaussian",
        metric=metric,
        params={"dim": dim, "lam": lam},
        expectations={
            "ricci_flat": True,
            "lcf": True,
            "constant_curvature": 0,
            "scalar_curvature": chart.scalar(0),
        },
        potential=ScalarField(potential, xs),
        lam=lam,
    )


def space_form(dim: int = 3, c=1) -> MetricInstance:
    """
    常曲率 c 的洛伦兹空间形式（共形模型 (1 + (c/4)η(x,x))^{-2}η）

    采样盒半宽取 conformal_half_width，使 |c/4·η(x,x)| ≤ ½，远离奇异二次曲面。
    附带类光向量场 ∂x1 + ∂x2，用来展示 pr-wave 条件不成立（c ≠ 0 时）。
    """
    dim = _count(dim, "dim", 2, MAX_TRANSVERSE + 2)
    c = _number(c, "c")
    half = conformal_half_width(float(c), dim)
    chart = Chart(tuple(f"x{i + 1}" for i in range(dim)), ((-half, half),) * dim)
    factor, diagonal = _conformal_factor(chart.symbols, c, lorentzian=True)
    metric = MetricField(chart, sp.diag(*[factor * e for e in diagonal]))
    null_vector = _null_direction(chart, [1, 1] + [0] * (dim - 2))
    expectations = {
        "constant_curvature": c,
        "lcf": True,
        "scalar_curvature": chart.scalar(c * dim * (dim - 1)),
        "null_vector": null_vector,
        "pr_wave": c == 0 or dim == 2,
    }
    if c != 0:
        expectations["curvature_recurrence"] = "parallel"
    return MetricInstance(
        family="space_form",
        metric=metric,
        params={"dim": dim, "c": c},
        expectations=expectations,
    )


# ---- 二维稳定孤立子 ----

def _cigar_singularities(case: str, a, b, r, box) -> list:
    """ω 的零点（以及 tan 的极点）落在 t 轴上的位置"""
    lo, hi = box
    a, b, r = float(a), float(b), float(r)
    if a == 0:
        return []
    if case in ("flat", "tanh"):
        return [-b / a]
    s_values = sorted(r * (a * t + b) / math.sqrt(2) for t in (lo, hi))
    first = math.floor(s_values[0] / (math.pi / 2)) - 1
    last = math.ceil(s_values[1] / (math.pi / 2)) + 1
    return [(math.sqrt(2) * (k * math.pi / 2) / r - b) / a for k in range(first, last + 1)]


def _cigar_completeness(case: str, a, b, r, box) -> dict:
    a, b, r = float(a), float(b), float(r)
    lo, hi = box
    if case == "tanh":
        return {"interval": (-math.inf, math.inf), "verdict": "complete"}
    if case == "flat":
        if a == 0:
            return {"interval": (-math.inf, math.inf), "verdict": "complete"}
        zero = -b / a
        interval = (zero, math.inf) if lo >= zero else (-math.inf, zero)
        return {"interval": interval, "verdict": "incomplete"}
    middle = r * (a * (lo + hi) / 2 + b) / math.sqrt(2)
    k = round(middle / math.pi)
    ends = sorted((math.sqrt(2) * s / r - b) / a for s in (k * math.pi - math.pi / 2, k * math.pi + math.pi / 2))
    return {"interval": tuple(ends), "verdict": "incomplete"}


def cigar_2d(case: str = "tanh", a=1, b=0, r=1, d=0) -> SolitonInstance:
    """
    二维稳定梯度孤立子 −dt² + ω(t)²ds²

    满足 f' = κω、κωω' = ω'' 的三种情形：
    - flat（κ = 0）：ω = at + b，f = d，度量平坦
    - tan（κ = r²）：ω = (√2a/r)tan(s)，f = d − log(cos²s)，τ = 2a²r²sec²s
    - tanh（κ = −r²）：ω = (√2a/r)tanh(s)，f = d − 2 log cosh(s)，τ = −2a²r²sech²s
    其中 s = r(at + b)/√2。采样盒避开 ω 的零点与 tan 的极点。

    异常：
    - ParameterError: 未知情形、r ≤ 0 或 ω 恒为零
    """
    if case not in ("flat", "tan", "tanh"):
        raise ParameterError(f"未知的 cigar 情形: {case}（可选 flat、tan、tanh）")
    a, b, r, d = (_number(v, k) for v, k in ((a, "a"), (b, "b"), (r, "r"), (d, "d")))
    if case != "flat" and r <= 0:
        raise ParameterError(f"tan/tanh 情形要求 r > 0: r = {r}")
    if a == 0 and (case != "flat" or b == 0):
        raise ParameterError("ω 恒为零，度量退化")

    t_box = shrink_interval(*default_interval(), _cigar_singularities(case, a, b, r, default_interval()))
    if t_box is None:
        raise ParameterError("采样区间内找不到避开奇异点的子区间")
    chart = Chart(("t", "s"), (t_box, default_interval()))
    t = chart.symbols[0]
    arg = r * (a * t + b) / SQRT2
    if case == "flat":
        omega, potential, tau = a * t + b, d, sp.Integer(0)
    elif case == "tan":
        omega = SQRT2 * a / r * sp.tan(arg)
        potential = d - sp.log(sp.cos(arg) ** 2)
        tau = 2 * a ** 2 * r ** 2 / sp.cos(arg) ** 2
    else:
        omega = SQRT2 * a / r * sp.tanh(arg)
        potential = d - 2 * sp.log(sp.cosh(arg))
        tau = -2 * a ** 2 * r ** 2 / sp.cosh(arg) ** 2

    metric = MetricField(chart, sp.diag(-1, omega ** 2))
    completeness = _cigar_completeness(case, a, b, r, t_box)
    completeness["omega"] = ScalarField(omega, chart.symbols)
    expectations = {
        "scalar_curvature": ScalarField(tau, chart.symbols),
        "warped": {"eps": -1, "psi": ScalarField(omega, chart.symbols), "c": 0, "fiber_dim": 1},
        "completeness": completeness,
    }
    if case == "flat":
        expectations["ricci_flat"] = True
    logger.debug(f"cigar_2d({case}) 采样区间 t ∈ {t_box}")
    return SolitonInstance(
        family="cigar_2d",
        metric=metric,
        params={"case": case, "a": a, "b": b, "r": r, "d": d},
        expectations=expectations,
        potential=ScalarField(potential, chart.symbols),
        lam=0,
    )


# ---- 翘曲积 ----

def _psi_zeros(psi: sp.Expr, t: sp.Symbol, lo: float, hi: float) -> list:
    """在 [lo, hi] 的细网格上扫描 ψ 的零点（变号或数值为零处）"""
    fn = sp.lambdify([t], psi, modules="math")
    ts = np.linspace(lo, hi, 2001)
    values = []
    for x in ts:
        try:
            values.append(float(fn(float(x))))
        except (ValueError, ZeroDivisionError, OverflowError):
            values.append(math.nan)
    zeros = []
    for k, value in enumerate(values):
        if math.isnan(value) or abs(value) < settings.TOL_SCALAR_ZERO:
            zeros.append(float(ts[k]))
        elif k and not math.isnan(values[k - 1]) and value * values[k - 1] < 0:
            zeros.append(float((ts[k] + ts[k - 1]) / 2))
    return zeros


def _warped_instance(
    family: str,
    eps,
    psi: sp.Expr,
    c,
    fiber_dim: int,
    potential: sp.Expr,
    lam,
    t_box: tuple,
    params: dict,
    expectations: dict,
) -> SolitonInstance:
    names = ("t",) + tuple(f"y{i + 1}" for i in range(fiber_dim))
    half = conformal_half_width(float(c), fiber_dim)
    chart = Chart(names, (t_box,) + ((-half, half),) * fiber_dim)
    ys = chart.symbols[1:]
    # ε = 1 时纤维取洛伦兹号差，保证整体是洛伦兹度量
    factor, diagonal = _conformal_factor(ys, c, lorentzian=(eps == 1))
    metric = MetricField(chart, sp.diag(eps, *[psi ** 2 * factor * e for e in diagonal]))
    psi_field = ScalarField(psi, chart.symbols)
    expectations = {
        **expectations,
        "warped": {"eps": eps, "psi": psi_field, "c": c, "fiber_dim": fiber_dim},
    }
    return SolitonInstance(
        family=family,
        metric=metric,
        params=params,
        expectations=expectations,
        potential=ScalarField(potential, chart.symbols),
        lam=lam,
    )


def _eps(value) -> int:
    eps = _number(value, "eps")
    if eps not in (1, -1):
        raise ParameterError(f"eps 只能取 1 或 −1: {eps}")
    return int(eps)


def einstein_brinkmann(eps=1, lam=1, a=1, b=0, fiber_dim: int = 2) -> SolitonInstance:
    """
    Einstein 情形（∇f 非类光）：I ×_{f'} N，f = (ελ/2)t² + at + b

    纤维 N 取常曲率 c = ελ² 的共形模型，使 τ_N = n(n+1)ελ²（n = fiber_dim − 1）；
    得到的实例 Ricci 平坦且 Hes_f = λg。

    异常：
    - ParameterError: f' 恒为零，或采样区间内找不到避开 f' = 0 的子区间
    """
    eps = _eps(eps)
    lam, a, b = _number(lam, "lam"), _number(a, "a"), _number(b, "b")
    fiber_dim = _count(fiber_dim, "fiber_dim", 1, MAX_TRANSVERSE + 1)
    if lam == 0 and a == 0:
        raise ParameterError("f' 恒为零，翘曲函数退化")
    t = sp.Symbol("t")
    psi = eps * lam * t + a
    singular = [] if lam == 0 else [float(-a / (eps * lam))]
    t_box = shrink_interval(*default_interval(), singular)
    if t_box is None:
        raise ParameterError("采样区间内找不到 f' ≠ 0 的子区间")
    c = eps * lam ** 2
    return _warped_instance(
        "einstein_brinkmann",
        eps,
        psi,
        c,
        fiber_dim,
        eps * lam / 2 * t ** 2 + a * t + b,
        lam,
        t_box,
        {"eps": eps, "lam": lam, "a": a, "b": b, "fiber_dim": fiber_dim},
        {"ricci_flat": True, "scalar_curvature": 0},
    )


def warped_rw(
    eps=-1,
    psi="sqrt(2)*tanh(t/sqrt(2))",
    c=0,
    fiber_dim: int = 1,
    f="-2*log(cosh(t/sqrt(2)))",
    lam=0,
    t_min: Optional[float] = None,
    t_max: Optional[float] = None,
) -> SolitonInstance:
    """
    一般翘曲积 εdt² + ψ(t)²g_N，纤维为常曲率 c 的共形模型，势函数 f(t)

    一般的 (ψ, f) 不满足孤立子方程，是否成立由验证决定。未给出 t 区间时自动避开 ψ 的零点；
    显式给出的区间内含 ψ 的零点时报错。
    """
    eps = _eps(eps)
    c, lam = _number(c, "c"), _number(lam, "lam")
    fiber_dim = _count(fiber_dim, "fiber_dim", 1, MAX_TRANSVERSE + 1)
    t = sp.Symbol("t")
    psi_expr = psi.expr if isinstance(psi, ScalarField) else parse_expression(psi, [t])
    f_expr = f.expr if isinstance(f, ScalarField) else parse_expression(f, [t])
    for name, expr in (("psi", psi_expr), ("f", f_expr)):
        if expr.free_symbols - {t}:
            raise ParameterError(f"{name} 只能依赖 t")
    if psi_expr == 0:
        raise ParameterError("ψ 恒为零")

    explicit = t_min is not None or t_max is not None
    lo = float(t_min) if t_min is not None else default_interval()[0]
    hi = float(t_max) if t_max is not None else default_interval()[1]
    if not lo < hi:
        raise ParameterError(f"t 区间为空: [{lo}, {hi}]")
    zeros = _psi_zeros(psi_expr, t, lo, hi)
    if explicit and zeros:
        raise ParameterError(f"ψ 在给定区间 [{lo}, {hi}] 内有零点（约 t = {zeros[0]:.4g}）")
    t_box = (lo, hi) if not zeros else shrink_interval(lo, hi, zeros)
    if t_box is None:
        raise ParameterError("找不到 ψ ≠ 0 的子区间")
    params = {"eps": eps, "psi": psi_expr, "c": c, "fiber_dim": fiber_dim, "f": f_expr, "lam": lam}
    return _warped_instance("warped_rw", eps, psi_expr, c, fiber_dim, f_expr, lam, t_box, params, {})


# ---- pp-wave 族 ----

def pp_wave(H="x1^3", n: int = 2) -> MetricInstance:
    """
    pp-wave 度量 2dudv + H(u, x)du² + Σdx_i²（只做结构检查）

    声明 ∂v 为平行类光向量场（pr-wave 条件成立），并按横向 Hessian 判定是否局部共形平坦。
    """
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    H = chart.scalar(H)
    if H.mentions("v"):
        raise ParameterError("pp-wave 剖面函数 H 不能依赖 v")
    return MetricInstance(
        family="pp_wave",
        metric=_pp_metric(chart, H.expr),
        params={"H": H, "n": n},
        expectations=_pp_expectations(chart, H, None),
    )


def _pp_expectations(chart: Chart, H: ScalarField, kappa: Optional[list]) -> dict:
    dim = chart.dimension
    expectations = {
        "pp_wave": True,
        "null_vector": _null_direction(chart, [0, 1] + [0] * (dim - 2)),
        "pr_wave": True,
        "scalar_curvature": chart.scalar(0),
        "lcf": is_cflat(H, chart),
    }
    if is_ricci_flat_profile(H, chart):
        expectations["ricci_flat"] = True
    if kappa is not None:
        norm = sp.Add(*(k ** 2 for k in kappa))
        expectations["kappa"] = list(kappa)
        expectations["gradient_norm"] = norm
        expectations["causal"] = "null" if norm == 0 else "spacelike"
        expectations["isotropic"] = norm == 0
    return expectations


def _pp_gradient_soliton(
    family: str,
    chart: Chart,
    H: ScalarField,
    kappa: list,
    params: dict,
    expectations: Optional[dict] = None,
    u0=0,
    f0=0,
    df0=0,
) -> SolitonInstance:
    """
    pp-wave 上的稳定梯度孤立子 f = f₀(u) + Σκ_i x_i，f₀'' = −ρ_uu − ½Σκ_i∂_iH

    异常：
    - XDependentRHS: 右端项依赖横向坐标（此时不存在这种形式的势函数）
    """
    metric = _pp_metric(chart, H.expr)
    rho_uu = curvature.ricci(metric).components[0, 0]
    xs = chart.symbols[2:]
    rhs = -rho_uu - HALF * sp.Add(*(k * sp.diff(H.expr, x) for k, x in zip(kappa, xs)))
    rhs_field = ScalarField(rhs, chart.symbols)
    second = analysis.u_only_expression(rhs_field)
    u0, f0, df0 = (float(_number(v, k)) for v, k in ((u0, "u0"), (f0, "f0"), (df0, "df0")))
    solution = analysis.solve_f0(rhs_field, u0, f0, df0, chart.interval("u"))
    f0_field = analysis.as_field(solution, chart.symbols, second=second)
    potential = f0_field.expr + sp.Add(*(k * x for k, x in zip(kappa, xs)))
    merged = {**_pp_expectations(chart, H, kappa), **(expectations or {})}
    logger.info(f"{family}: f0'' = {second}，{'精确解' if solution.closed_form is not None else '数值解'}")
    return SolitonInstance(
        family=family,
        metric=metric,
        params=params,
        expectations=merged,
        ode_fed=solution.closed_form is None,
        potential=ScalarField(potential, chart.symbols),
        lam=0,
        solutions={"f0": solution},
    )


def pp_wave_soliton(H="x1^2+x2^2", n: int = 2, kappa=None, u0=0, f0=0, df0=0) -> SolitonInstance:
    """一般 pp-wave 梯度孤立子（κ 缺省为 0）"""
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    H = chart.scalar(H)
    if H.mentions("v"):
        raise ParameterError("pp-wave 剖面函数 H 不能依赖 v")
    kappa = [_number(k, f"kappa{i + 1}") for i, k in enumerate(_vector_param(kappa, n, "kappa"))]
    params = {"H": H, "n": n, "kappa": kappa}
    return _pp_gradient_soliton("pp_wave_soliton", chart, H, kappa, params, None, u0, f0, df0)


def plane_wave(n: int = 2, a=None, u0=0, f0=0, df0=0) -> SolitonInstance:
    """
    平面波 H = Σa_ij(u)x_ix_j（a 对称），f₀'' = −ρ_uu = Σa_ii

    a 缺省为单位矩阵。
    """
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    if a is None:
        a = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    coeffs = _symmetric(chart, _matrix_param(a, n, "a"), "a")
    xs = chart.symbols[2:]
    H = ScalarField(
        sp.Add(*(coeffs[i][j] * xs[i] * xs[j] for i in range(n) for j in range(n))),
        chart.symbols,
    )
    params = {"n": n, "a": [[ScalarField(e, chart.symbols) for e in row] for row in coeffs]}
    return _pp_gradient_soliton("plane_wave", chart, H, [0] * n, params, None, u0, f0, df0)


def cflat_pp_wave(n: int = 2, a="1", b=None, c="0", u0=0, f0=0, df0=0) -> SolitonInstance:
    """
    局部共形平坦 pp-wave H = a(u)Σx_i² + Σb_i(u)x_i + c(u)，f₀'' = n·a(u)

    a(u) 在 u 区间上无零点时 R 与 ρ 都递归，σ = (a'/a)du（a 为常数时平行）。
    """
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    a_field = _u_field(chart, a, "a")
    b_fields = [_u_field(chart, v, f"b{i + 1}") for i, v in enumerate(_vector_param(b, n, "b"))]
    c_field = _u_field(chart, c, "c")
    H = _cflat_profile(chart, a_field, b_fields, c_field)
    params = {"n": n, "a": a_field, "b": b_fields, "c": c_field}
    return _pp_gradient_soliton(
        "cflat_pp_wave", chart, H, [0] * n, params,
        {"lcf": True, **_cflat_recurrence(chart, a_field)}, u0, f0, df0,
    )


def _cflat_recurrence(chart: Chart, a_field: ScalarField) -> dict:
    """
    ρ = −n·a(u)du⊗du 且 R_uiuj = −a(u)δ_ij，du 平行：
    a 为非零常数时 ∇R = ∇ρ = 0；a 在 u 区间上无零点时 σ = (a'/a)du
    """
    if a_field.is_zero:
        return {}
    u = chart.symbols[0]
    slope = sp.diff(a_field.expr, u)
    if slope == 0:
        return {"curvature_recurrence": "parallel", "ricci_recurrence": "parallel"}
    try:
        _nonvanishing_on_box(a_field, chart, "a")
    except (ParameterError, ValueError, ZeroDivisionError, OverflowError):
        return {}
    sigma = [ScalarField(slope / a_field.expr, chart.symbols)] + [
        ScalarField(0, chart.symbols) for _ in range(chart.dimension - 1)
    ]
    return {
        "curvature_recurrence": "recurrent",
        "curvature_sigma": sigma,
        "ricci_recurrence": "recurrent",
        "ricci_sigma": sigma,
    }


def _cflat_profile(chart, a_field, b_fields, c_field) -> ScalarField:
    xs = chart.symbols[2:]
    expr = a_field.expr * sp.Add(*(x ** 2 for x in xs)) + sp.Add(
        *(b.expr * x for b, x in zip(b_fields, xs))
    ) + c_field.expr
    return ScalarField(expr, chart.symbols)


def recurrent_type1(n: int = 2, kappa1=1, h0="1", h1="0", h2="0") -> SolitonInstance:
    """
    递归 pp-wave（第一类）：H = e^{κ1 x1}h0(u)/κ1² + h1(u) + x1 h2(u)，f = f₀(u) + κ1 x1，
    f₀'' = −(κ1/2)h2(u)

    曲率递归：∇R = σ⊗R，σ = (h0'/h0)du + κ1 dx1。

    异常：
    - ParameterError: κ1 = 0 或 h0 恒为零（此时度量平坦）
    """
    n = _count(n, "n", 1)
    kappa1 = _number(kappa1, "kappa1")
    if kappa1 == 0:
        raise ParameterError("第一类递归解要求 κ1 ≠ 0")
    chart = _pp_chart(n)
    h0_f, h1_f, h2_f = (_u_field(chart, v, k) for v, k in ((h0, "h0"), (h1, "h1"), (h2, "h2")))
    if h0_f.is_zero:
        raise ParameterError("h0 恒为零时度量平坦，不是真正的递归流形")
    u, x1 = chart.symbols[0], chart.symbols[2]
    H = ScalarField(
        sp.exp(kappa1 * x1) * h0_f.expr / kappa1 ** 2 + h1_f.expr + x1 * h2_f.expr,
        chart.symbols,
    )
    sigma = [sp.diff(h0_f.expr, u) / h0_f.expr, 0, kappa1] + [0] * (n - 1)
    sigma_fields = [ScalarField(s, chart.symbols) for s in sigma]
    kappa = [kappa1] + [0] * (n - 1)
    params = {"n": n, "kappa1": kappa1, "h0": h0_f, "h1": h1_f, "h2": h2_f}
    expectations = {
        "curvature_recurrence": "recurrent",
        "curvature_sigma": sigma_fields,
        "ricci_recurrence": "recurrent",
        "ricci_sigma": sigma_fields,
    }
    return _pp_gradient_soliton("recurrent_type1", chart, H, kappa, params, expectations)


def _nonvanishing_on_box(field: ScalarField, chart: Chart, name: str) -> None:
    """u 的函数在 u 区间上不变号且不为零"""
    u = chart.symbols[0]
    fn = sp.lambdify([u], field.expr, modules="math")
    lo, hi = chart.interval("u")
    values = np.array([float(fn(float(x))) for x in np.linspace(lo, hi, 401)])
    if np.any(np.abs(values) < settings.TOL_SCALAR_ZERO) or (np.any(values > 0) and np.any(values < 0)):
        raise ParameterError(f"{name} 在 u ∈ [{lo}, {hi}] 上有零点")


def recurrent_type2(n: int = 2, a="u", b=(2, 1), kappa=None) -> SolitonInstance:
    """
    递归 pp-wave（第二类）：H = a(u)Σb_i x_i²，f = f₀(u) + Σκ_i x_i，f₀'' = a(u)Σb_i

    约束：|b1| ≥ … ≥ |bn| 且 b2 ≠ 0，
    a'(u) 在采样区间上无零点，且 b_i ≠ 0 处 κ_i = 0。κ 全为零时 ∇f 类光（各向同性），
    否则类空。曲率递归 σ = (a'/a)du。
    """
    n = _count(n, "n", 2)
    chart = _pp_chart(n)
    a_field = _u_field(chart, a, "a")
    bs = [_number(v, f"b{i + 1}") for i, v in enumerate(_vector_param(b, n, "b"))]
    kappa = [_number(k, f"kappa{i + 1}") for i, k in enumerate(_vector_param(kappa, n, "kappa"))]
    magnitudes = [abs(v) for v in bs]
    if magnitudes != sorted(magnitudes, reverse=True):
        raise ParameterError(f"第二类递归解要求 |b1| ≥ … ≥ |bn|: {bs}")
    if bs[1] == 0:
        raise ParameterError("第二类递归解要求 b2 ≠ 0")
    for i, (bi, ki) in enumerate(zip(bs, kappa)):
        if bi != 0 and ki != 0:
            raise ParameterError(f"b{i + 1} ≠ 0 时必须 kappa{i + 1} = 0")
    u = chart.symbols[0]
    da = a_field.partial(u)
    if da.is_zero:
        raise ParameterError("第二类递归解要求 a'(u) ≠ 0")
    _nonvanishing_on_box(da, chart, "a'(u)")
    xs = chart.symbols[2:]
    H = ScalarField(a_field.expr * sp.Add(*(bi * x ** 2 for bi, x in zip(bs, xs))), chart.symbols)
    sigma = [ScalarField(s, chart.symbols) for s in [da.expr / a_field.expr] + [0] * (n + 1)]
    expectations = {"curvature_recurrence": "recurrent", "curvature_sigma": sigma}
    if sum(bs) != 0:
        expectations.update({"ricci_recurrence": "recurrent", "ricci_sigma": sigma})
    params = {"n": n, "a": a_field, "b": bs, "kappa": kappa}
    return _pp_gradient_soliton("recurrent_type2", chart, H, kappa, params, expectations)


def two_symmetric(n: int = 2, a=(1, 2), b=None) -> SolitonInstance:
    """
    二阶对称 pp-wave：H = Σ(a_ij u + b_ij)x_ix_j，a 对角且 0 ≠ a11 ≤ … ≤ ann，b 对称常数
    f₀'' = Σ(a_ii u + b_ii)

    ∇²R = 0 而 ∇R ≠ 0。
    """
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    diag = [_number(v, f"a{i + 1}{i + 1}") for i, v in enumerate(_vector_param(a, n, "a"))]
    if any(v == 0 for v in diag):
        raise ParameterError(f"二阶对称解要求 a_ii 全部非零: {diag}")
    if diag != sorted(diag):
        raise ParameterError(f"二阶对称解要求 a11 ≤ … ≤ ann: {diag}")
    coeffs = _symmetric(chart, _matrix_param(b, n, "b"), "b", coefficient=_constant)
    u = chart.symbols[0]
    xs = chart.symbols[2:]
    H = ScalarField(
        sp.Add(*((diag[i] * u * (1 if i == j else 0) + coeffs[i][j]) * xs[i] * xs[j]
                 for i in range(n) for j in range(n))),
        chart.symbols,
    )
    params = {"n": n, "a": diag, "b": coeffs}
    return _pp_gradient_soliton("two_symmetric", chart, H, [0] * n, params, {"two_symmetric": True})


def conformally_symmetric(n: int = 2, a="u", b=((1, 0), (0, -1))) -> SolitonInstance:
    """
    共形对称 pp-wave：H = a(u)Σx_i² + Σb_ij x_ix_j，b 对称、非零、迹为零
    f₀'' = n·a(u)

    ∇W = 0 而 W ≠ 0。
    """
    n = _count(n, "n", 2)
    chart = _pp_chart(n)
    a_field = _u_field(chart, a, "a")
    coeffs = _symmetric(chart, _matrix_param(b, n, "b"), "b", coefficient=_constant)
    if all(coeffs[i][j] == 0 for i in range(n) for j in range(n)):
        raise ParameterError("共形对称解要求 b ≠ 0")
    trace = sp.Add(*(coeffs[i][i] for i in range(n)))
    if trace != 0:
        raise ParameterError(f"共形对称解要求 Σb_ii = 0，实际为 {trace}")
    xs = chart.symbols[2:]
    H = ScalarField(
        a_field.expr * sp.Add(*(x ** 2 for x in xs))
        + sp.Add(*(coeffs[i][j] * xs[i] * xs[j] for i in range(n) for j in range(n))),
        chart.symbols,
    )
    params = {"n": n, "a": a_field, "b": coeffs}
    expectations = {"conformally_symmetric": True, "lcf": False}
    return _pp_gradient_soliton("conformally_symmetric", chart, H, [0] * n, params, expectations)


# ---- 非梯度孤立子 ----

def cflat_soliton_vector(
    n: int = 2,
    a="1",
    b=None,
    c="0",
    lam=1,
    u0=0,
    q0=0,
    dq0=0,
    p0=0,
) -> SolitonInstance:
    """
    局部共形平坦 pp-wave 上的非梯度 Ricci 孤立子

    X = (p − Σq_i'x_i + 2λv)∂v + Σ(q_i + λx_i)∂i，其中
    a q_i − q_i'' = (λ/2)b_i，p' = λc − ½Σb_iq_i + n·a
    """
    n = _count(n, "n", 1)
    lam = _number(lam, "lam")
    chart = _pp_chart(n)
    a_field = _u_field(chart, a, "a")
    b_fields = [_u_field(chart, v, f"b{i + 1}") for i, v in enumerate(_vector_param(b, n, "b"))]
    c_field = _u_field(chart, c, "c")
    H = _cflat_profile(chart, a_field, b_fields, c_field)

    u0, q0, dq0, p0 = (_number(v, k) for v, k in ((u0, "u0"), (q0, "q0"), (dq0, "dq0"), (p0, "p0")))
    p_solution, q_solutions = analysis.solve_functcond(
        a_field, b_fields, c_field, lam, float(u0), q0, dq0, p0, chart.interval("u")
    )
    q_fields = [
        analysis.as_field(
            sol, chart.symbols, second=lambda node, b_i=b_i: a_field.expr * node - lam / 2 * b_i.expr
        )
        for sol, b_i in zip(q_solutions, b_fields)
    ]
    u, v = chart.symbols[:2]
    xs = chart.symbols[2:]
    p_rate = lam * c_field.expr - HALF * sp.Add(
        *(b_i.expr * q.expr for b_i, q in zip(b_fields, q_fields))
    ) + n * a_field.expr
    p_field = analysis.as_field(p_solution, chart.symbols, second=sp.diff(p_rate, u))

    components = [0, p_field.expr - sp.Add(*(sp.diff(q.expr, u) * x for q, x in zip(q_fields, xs))) + 2 * lam * v]
    components += [q.expr + lam * x for q, x in zip(q_fields, xs)]
    X = TensorField.from_function(chart, ("u",), lambda k: components[k])
    ode_fed = p_solution.closed_form is None or any(q.closed_form is None for q in q_solutions)
    solutions = {"p": p_solution, **{f"q{i + 1}": q for i, q in enumerate(q_solutions)}}
    params = {"n": n, "a": a_field, "b": b_fields, "c": c_field, "lam": lam}
    expectations = _pp_expectations(chart, H, None)
    expectations["lcf"] = True
    return SolitonInstance(
        family="cflat_soliton_vector",
        metric=_pp_metric(chart, H.expr),
        params=params,
        expectations=expectations,
        ode_fed=ode_fed,
        vector_field=X,
        lam=lam,
        solutions=solutions,
    )


# ---- Einstein 类光情形 ----

def einstein_null(n: int = 2, f="u") -> SolitonInstance:
    """
    Einstein 情形（∇f 类光）：g = 2dudv + Σdx_i²，f = f(u) 且 f'' = 0

    异常：
    - ParameterError: f 依赖 u 以外的坐标或 f'' ≠ 0
    """
    n = _count(n, "n", 1)
    chart = _pp_chart(n)
    f_field = chart.scalar(f)
    if f_field.expr.free_symbols - {chart.symbols[0]}:
        raise ParameterError("势函数只能依赖 u")
    if sp.simplify(f_field.partial("u", 2).expr) != 0:
        raise ParameterError(f"要求 f''(u) = 0: f = {f_field}")
    slope = sp.simplify(f_field.partial("u").expr)
    H = ScalarField(0, chart.symbols)
    expectations = {**_pp_expectations(chart, H, [0] * n), "ricci_flat": True}
    if slope == 0:
        expectations.pop("causal")
    return SolitonInstance(
        family="einstein_null",
        metric=_pp_metric(chart, sp.Integer(0)),
        params={"n": n, "f": f_field},
        expectations=expectations,
        potential=f_field,
        lam=0,
    )
