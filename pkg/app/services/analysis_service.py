"""
常微分方程求解：势函数 f₀ 与非梯度孤立子的 (p, q_i)

- 右端项为 u 的次数 ≤ EXACT_POLY_MAX_DEGREE 的多项式时走精确积分路径（误差估计为 0）
- 否则用固定步长 RK4 从 u₀ 向两侧积分，并以步长 2h 的第二次积分做 Richardson 误差估计
- 数值解通过 ScalarField 的表格函数节点接入符号引擎（值与一阶导来自三次 Hermite 插值，
  二阶导等于方程右端项）
"""
import logging
import math
from typing import Callable, Sequence
import numpy as np
import sympy as sp
from app.config import settings
from app.errors import SolverStepFailure, XDependentRHS
from app.models.ode import ODESolution
from app.models.scalar_field import ScalarField, tabulated
from app.utils.expression import coordinate_symbol, exact_number
from app.utils.sampling import default_interval

logger = logging.getLogger(__name__)


def _solution_interval(interval=None) -> tuple:
    lo, hi = interval if interval is not None else default_interval()
    pad = settings.ODE_GRID_PADDING
    return float(lo) - pad, float(hi) + pad


def u_only_expression(field: ScalarField, variable: str = "u") -> sp.Expr:
    """右端项只能依赖 u；先展开再化简，排除可以相消的横向坐标"""
    u = coordinate_symbol(variable)
    expr = field.expr
    others = expr.free_symbols - {u}
    if others:
        expr = sp.expand(expr)
        others = expr.free_symbols - {u}
    if others:
        expr = sp.simplify(expr)
        others = expr.free_symbols - {u}
    if others:
        raise XDependentRHS(others)
    return expr


def _is_exact_polynomial(expr: sp.Expr, u: sp.Symbol) -> bool:
    if not expr.is_polynomial(u):
        return False
    return sp.Poly(expr, u).degree() <= settings.EXACT_POLY_MAX_DEGREE if expr.has(u) else True


def _grid(u0: float, lo: float, hi: float, step: float) -> np.ndarray:
    """包含 u₀ 的网格：两侧各取偶数个等距步，步长不超过 step"""
    def side(length):
        if length <= 0:
            return 0
        count = max(2, math.ceil(length / step))
        return count + (count % 2)

    back, forward = side(u0 - lo), side(hi - u0)
    left = np.linspace(u0, lo, back + 1)[::-1] if back else np.array([u0])
    right = np.linspace(u0, hi, forward + 1) if forward else np.array([u0])
    return np.concatenate([left[:-1], right])


def _rk4_march(fun: Callable, nodes: np.ndarray, y0: np.ndarray) -> np.ndarray:
    """沿给定节点（单调）做经典 RK4"""
    ys = np.empty((len(nodes), len(y0)))
    ys[0] = y0
    y = np.array(y0, dtype=float)
    for k in range(len(nodes) - 1):
        u, h = nodes[k], nodes[k + 1] - nodes[k]
        k1 = fun(u, y)
        k2 = fun(u + h / 2, y + h / 2 * k1)
        k3 = fun(u + h / 2, y + h / 2 * k2)
        k4 = fun(u + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise SolverStepFailure(f"RK4 在 u = {nodes[k + 1]:.6g} 处得到非有限值")
        ys[k + 1] = y
    return ys


def integrate_ivp(fun: Callable, y0: Sequence[float], u0: float, interval=None, step: float = None):
    """
    一阶方程组初值问题 y' = fun(u, y)，从 u₀ 向两侧积分

    返回：
    - (grid, values, error_estimate)：values 形状为 (len(grid), len(y0))；
      error_estimate 为步长 h 与 2h 两次积分在公共节点上的最大差 / 15

    异常：
    - SolverStepFailure: 积分得到非有限值
    """
    step = settings.RK_STEP if step is None else step
    lo, hi = _solution_interval(interval)
    lo, hi = min(lo, u0), max(hi, u0)
    grid = _grid(float(u0), lo, hi, step)
    center = int(np.argmin(np.abs(grid - u0)))
    y0 = np.array(y0, dtype=float)

    def march(nodes):
        right = _rk4_march(fun, nodes[center:], y0)
        left = _rk4_march(fun, nodes[: center + 1][::-1], y0)[::-1]
        return np.vstack([left[:-1], right])

    fine = march(grid)
    # 左右两侧都是偶数步，隔点取样后 u₀ 仍是节点
    coarse_grid = grid[center % 2::2]
    coarse_center = center // 2
    coarse_right = _rk4_march(fun, coarse_grid[coarse_center:], y0)
    coarse_left = _rk4_march(fun, coarse_grid[: coarse_center + 1][::-1], y0)[::-1]
    coarse = np.vstack([coarse_left[:-1], coarse_right])
    error = float(np.max(np.abs(fine[center % 2::2] - coarse))) / 15.0
    logger.debug(f"RK4 积分完成: 节点数={len(grid)}, 误差估计={error:.3e}")
    return grid, fine, error


def _compile(expr: sp.Expr, symbols) -> Callable:
    return sp.lambdify(symbols, expr, modules="math")


def solve_f0(
    rhs: ScalarField,
    u0: float = 0.0,
    f0: float = 0.0,
    df0: float = 0.0,
    interval=None,
    variable: str = "u",
) -> ODESolution:
    """
    求解 f₀'' = rhs(u)，f₀(u₀) = f0，f₀'(u₀) = df0

    参数：
    - rhs: 右端项（只能依赖 u）
    - interval: 需要覆盖的 u 区间（默认采样区间，两侧再加 ODE_GRID_PADDING）

    返回：
    - ODESolution；右端项为低次多项式时带精确闭式 closed_form

    异常：
    - XDependentRHS: 右端项依赖 u 以外的坐标（方程无解）
    """
    u = coordinate_symbol(variable)
    expr = u_only_expression(rhs, variable)
    start = exact_number(u0)
    if _is_exact_polynomial(expr, u):
        s = sp.Dummy("s")
        first = exact_number(df0) + sp.integrate(expr.subs(u, s), (s, start, u))
        closed = sp.expand(exact_number(f0) + sp.integrate(first.subs(u, s), (s, start, u)))
        closed_field = ScalarField(closed, rhs.coordinates)
        lo, hi = _solution_interval(interval)
        grid = _grid(float(u0), min(lo, float(u0)), max(hi, float(u0)), settings.RK_STEP)
        value = _compile(closed, [u])
        slope = _compile(sp.diff(closed, u), [u])
        logger.debug(f"f0 走精确多项式路径: f0 = {closed_field}")
        return ODESolution(
            grid=grid,
            values=np.array([value(float(x)) for x in grid], dtype=float),
            derivatives=np.array([slope(float(x)) for x in grid], dtype=float),
            error_estimate=0.0,
            closed_form=closed_field,
        )

    rhs_fn = _compile(expr, [u])

    def fun(x, y):
        return np.array([y[1], float(rhs_fn(x))])

    try:
        grid, values, error = integrate_ivp(fun, [float(f0), float(df0)], float(u0), interval)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise SolverStepFailure(f"右端项在积分区间内无法求值: {e}")
    logger.info(f"f0 数值求解完成: 误差估计={error:.3e}")
    return ODESolution(grid=grid, values=values[:, 0], derivatives=values[:, 1], error_estimate=error)


def as_field(
    solution: ODESolution,
    coordinates,
    second: sp.Expr = None,
    variable: str = "u",
) -> ScalarField:
    """
    把 ODE 解接入符号引擎

    有闭式时直接返回闭式；否则构造表格函数节点，second 为其二阶导（可以引用节点本身，
    此时传入 callable(node) -> expr）。
    """
    if solution.closed_form is not None:
        return ScalarField(solution.closed_form.expr, coordinates)
    node, bind_second = tabulated(solution.label, variable, solution.value, solution.slope)
    if callable(second):
        bind_second(second(node))
    elif second is not None:
        bind_second(second)
    return ScalarField(node, coordinates)


def solve_functcond(
    a: ScalarField,
    b: Sequence[ScalarField],
    c: ScalarField,
    lam,
    u0: float = 0.0,
    q0: float = 0.0,
    dq0: float = 0.0,
    p0: float = 0.0,
    interval=None,
    variable: str = "u",
):
    """
    求解非梯度孤立子向量场的系数函数

    a q_i − q_i'' = (λ/2) b_i
    ½ Σ b_i q_i + ρ_uu + p' = λ c，其中 ρ_uu = −n a

    参数：
    - a, b, c: 系数函数（只能依赖 u），n = len(b)
    - q0, dq0: 每个 q_i 共用的初值 q_i(u₀)、q_i'(u₀)
    - p0: p(u₀)

    返回：
    - (p, q)：p 为 ODESolution，q 为 ODESolution 列表；能精确求解的分量带 closed_form
    """
    u = coordinate_symbol(variable)
    n = len(b)
    lam = exact_number(lam)
    a_expr = u_only_expression(a, variable)
    b_exprs = [u_only_expression(bi, variable) for bi in b]
    c_expr = u_only_expression(c, variable)
    coordinates = a.coordinates
    trivial = exact_number(q0) == 0 and exact_number(dq0) == 0

    closed_q = []
    for b_i in b_exprs:
        if b_i == 0 and trivial:
            closed_q.append(sp.Integer(0))
        elif a_expr == 0 and _is_exact_polynomial(b_i, u):
            closed_q.append(solve_f0(
                ScalarField(-lam * b_i / 2, coordinates), u0, q0, dq0, interval, variable
            ).closed_form.expr)
        else:
            closed_q.append(None)

    if all(q is not None for q in closed_q):
        integrand = lam * c_expr - sp.Rational(1, 2) * sp.Add(*(bi * qi for bi, qi in zip(b_exprs, closed_q))) + n * a_expr
        p = solve_f0_first_order(ScalarField(integrand, coordinates), u0, p0, interval, variable)
        q = [_closed_solution(qi, coordinates, u, interval, u0, f"q{i + 1}") for i, qi in enumerate(closed_q)]
        return p, q

    # 联立积分：状态为 (q_1, q_1', …, q_n, q_n', p)
    a_fn = _compile(a_expr, [u])
    b_fns = [_compile(bi, [u]) for bi in b_exprs]
    c_fn = _compile(c_expr, [u])
    lam_f = float(lam)

    def fun(x, y):
        ax, cx = float(a_fn(x)), float(c_fn(x))
        bx = [float(f(x)) for f in b_fns]
        out = np.empty_like(y)
        for i in range(n):
            out[2 * i] = y[2 * i + 1]
            out[2 * i + 1] = ax * y[2 * i] - lam_f * bx[i] / 2
        out[-1] = lam_f * cx - 0.5 * sum(bx[i] * y[2 * i] for i in range(n)) + n * ax
        return out

    y0 = [float(q0), float(dq0)] * n + [float(p0)]
    grid, values, error = integrate_ivp(fun, y0, float(u0), interval)
    derivatives = np.array([fun(x, y) for x, y in zip(grid, values)])
    q = [
        ODESolution(grid, values[:, 2 * i], values[:, 2 * i + 1], error, label=f"q{i + 1}")
        for i in range(n)
    ]
    p = ODESolution(grid, values[:, -1], derivatives[:, -1], error, label="p")
    logger.info(f"functcond 数值求解完成: n={n}, λ={lam}, 误差估计={error:.3e}")
    return p, q


def solve_f0_first_order(
    integrand: ScalarField,
    u0: float = 0.0,
    p0: float = 0.0,
    interval=None,
    variable: str = "u",
) -> ODESolution:
    """p' = integrand(u)，p(u₀) = p0：多项式时精确求原函数，否则数值求积（RK4）"""
    u = coordinate_symbol(variable)
    expr = u_only_expression(integrand, variable)
    if _is_exact_polynomial(expr, u):
        s = sp.Dummy("s")
        closed = sp.expand(exact_number(p0) + sp.integrate(expr.subs(u, s), (s, exact_number(u0), u)))
        return _closed_solution(closed, integrand.coordinates, u, interval, u0, "p")
    fn = _compile(expr, [u])
    grid, values, error = integrate_ivp(lambda x, y: np.array([float(fn(x))]), [float(p0)], float(u0), interval)
    derivatives = np.array([float(fn(x)) for x in grid])
    return ODESolution(grid, values[:, 0], derivatives, error, label="p")


def _closed_solution(expr, coordinates, u, interval, u0, label) -> ODESolution:
    lo, hi = _solution_interval(interval)
    grid = _grid(float(u0), min(lo, float(u0)), max(hi, float(u0)), settings.RK_STEP)
    value = _compile(expr, [u])
    slope = _compile(sp.diff(expr, u), [u])
    return ODESolution(
        grid=grid,
        values=np.array([float(value(float(x))) for x in grid]),
        derivatives=np.array([float(slope(float(x))) for x in grid]),
        error_estimate=0.0,
        closed_form=ScalarField(expr, coordinates),
        label=label,
    )
