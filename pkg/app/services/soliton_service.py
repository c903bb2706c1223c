"""
孤立子残差与恒等式

所有函数返回符号残差场（TensorField 或 ScalarField），由验证服务在采样点上取最大范数。
"""
import itertools
import logging
import numpy as np
import sympy as sp
from app.errors import DimensionError
from app.models.geometry import MetricField, TensorField
from app.models.scalar_field import ScalarField
from app.models.soliton import SolitonInstance
from app.services import curvature_service as curvature
from app.services.geometry_service import kulkarni_nomizu

logger = logging.getLogger(__name__)


def _require_potential(inst: SolitonInstance) -> ScalarField:
    if not inst.is_gradient:
        raise ValueError(f"{inst.instance_id} 不是梯度孤立子实例")
    return inst.potential


def soliton_vector_field(inst: SolitonInstance) -> TensorField:
    """孤立子向量场：梯度实例取 X = ∇f"""
    if inst.is_gradient:
        return curvature.gradient(inst.potential, inst.metric)
    return inst.vector_field


def apply_operator(T: TensorField, X: TensorField) -> TensorField:
    """(1,1) 张量作用于向量：T(X)^a = T^a_b X^b"""
    if T.index_types != ("u", "l") or X.index_types != ("u",):
        raise ValueError("需要 (1,1) 张量与逆变向量")
    dim = T.chart.dimension
    return TensorField.from_function(
        T.chart,
        ("u",),
        lambda a: sp.Add(*(T.components[a, b] * X.components[b] for b in range(dim) if X.components[b] != 0)),
    )


def gradient_soliton_residual(inst: SolitonInstance) -> TensorField:
    """Hes_f + ρ − λg"""
    f = _require_potential(inst)
    g = inst.metric
    return curvature.hessian(f, g) + curvature.ricci(g) - g.as_tensor().scale(inst.lam)


def ricci_soliton_residual(inst: SolitonInstance, X: TensorField = None) -> TensorField:
    """½𝓛_X g + ρ − λg；X 缺省时取实例自带的向量场（梯度实例取 ∇f）"""
    g = inst.metric
    X = X if X is not None else soliton_vector_field(inst)
    lie = curvature.lie_derivative_metric(X, g)
    return lie.scale(sp.Rational(1, 2)) + curvature.ricci(g) - g.as_tensor().scale(inst.lam)


def trace_residual(inst: SolitonInstance) -> ScalarField:
    """对孤立子方程取迹：Δf + τ − (n+2)λ"""
    f = _require_potential(inst)
    g = inst.metric
    return curvature.laplacian(f, g) + curvature.scalar_curvature(g) - g.dimension * inst.lam


def lemma_identities(inst: SolitonInstance):
    """
    梯度孤立子的两个恒等式

    返回：
    - (residual_1, residual_2)：residual_1 = ∇τ − 2Ric(∇f)（逆变向量场）；
      residual_2 = τ + ‖∇f‖² − 2λf（标量场，应为常数，由调用方在采样点上取极差）

    ‖∇f‖² 取 g(∇f, ∇f)。
    """
    f = _require_potential(inst)
    g = inst.metric
    tau = curvature.scalar_curvature(g)
    grad_f = curvature.gradient(f, g)
    grad_tau = curvature.gradient(tau, g)
    ric_grad = apply_operator(curvature.ricci_operator(g), grad_f)
    residual_1 = grad_tau - ric_grad.scale(2)
    residual_2 = tau + squared_norm(grad_f, g) - 2 * inst.lam * f
    return residual_1, residual_2


def squared_norm(X: TensorField, g: MetricField) -> ScalarField:
    """g(X, X)"""
    G = g.components
    dim = g.dimension
    x = X.components
    terms = [
        G[a, b] * x[a] * x[b]
        for a, b in itertools.product(range(dim), repeat=2)
        if G[a, b] != 0 and x[a] != 0 and x[b] != 0
    ]
    return ScalarField(sp.Add(*terms), g.chart.symbols)


def curv_identity_residual(inst: SolitonInstance) -> TensorField:
    """
    局部共形平坦梯度孤立子的曲率恒等式残差（三个自由槽位 X, Y, Z）

    R(X,Y,Z,∇f) + ρ(X,∇f)g(Y,Z)/(n+1) − ρ(Y,∇f)g(X,Z)/(n+1)
    """
    f = _require_potential(inst)
    g = inst.metric
    dim = g.dimension
    n = g.chart.n
    R = curvature.riemann(g).components
    rho = curvature.ricci(g).components
    G = g.components
    grad_f = curvature.gradient(f, g).components
    rho_f = [
        sp.Add(*(rho[a, d] * grad_f[d] for d in range(dim) if grad_f[d] != 0))
        for a in range(dim)
    ]
    factor = sp.Rational(1, n + 1)

    def component(a, b, c):
        lhs = sp.Add(*(R[a, b, c, d] * grad_f[d] for d in range(dim) if grad_f[d] != 0 and R[a, b, c, d] != 0))
        return lhs + factor * (rho_f[a] * G[b, c] - rho_f[b] * G[a, c])

    return TensorField.from_function(g.chart, ("l", "l", "l"), component)


def codazzi_schouten_residual(g: MetricField) -> TensorField:
    """
    Schouten 张量的 Codazzi 残差 (∇_a C)_bc − (∇_b C)_ac

    异常：
    - DimensionError: 维数 < 3
    """
    C = curvature.schouten(g)
    nabla = curvature.covariant_derivative(C, g).components
    return TensorField.from_function(
        g.chart, ("l", "l", "l"), lambda a, b, c: nabla[b, c, a] - nabla[a, c, b]
    )


def geodesic_residual(inst: SolitonInstance) -> TensorField:
    """∇_{∇f}∇f − (λ∇f − Ric(∇f))"""
    f = _require_potential(inst)
    g = inst.metric
    grad_f = curvature.gradient(f, g)
    nabla = curvature.covariant_derivative(grad_f, g).components
    dim = g.dimension
    along = TensorField.from_function(
        g.chart,
        ("u",),
        lambda a: sp.Add(*(nabla[a, e] * grad_f.components[e] for e in range(dim) if grad_f.components[e] != 0)),
    )
    ric_grad = apply_operator(curvature.ricci_operator(g), grad_f)
    return along - grad_f.scale(inst.lam) + ric_grad


def bianchi_residual(g: MetricField) -> TensorField:
    """缩并的第二 Bianchi 恒等式：dτ − 2 div ρ"""
    tau = curvature.scalar_curvature(g)
    return curvature.differential(tau, g) - curvature.divergence(curvature.ricci(g), g).scale(2)


def traceless_ricci(g: MetricField) -> TensorField:
    """ρ₀ = ρ − τ/(n+2) g"""
    tau = curvature.scalar_curvature(g)
    return curvature.ricci(g) - g.as_tensor().scale(tau.expr / g.dimension)


def decomposition_residual(g: MetricField) -> TensorField:
    """
    曲率分解残差

    R − (τ/(2(n+2)(n+1)) g⊙g + (1/n) ρ₀⊙g + W)
    """
    n = g.chart.n
    if n < 1:
        raise DimensionError(g.dimension, 3)
    tau = curvature.scalar_curvature(g).expr
    G = g.as_tensor()
    scalar_part = kulkarni_nomizu(G, G).scale(tau / (2 * (n + 2) * (n + 1)))
    ricci_part = kulkarni_nomizu(traceless_ricci(g), G).scale(sp.Rational(1, n))
    return curvature.riemann(g) - scalar_part - ricci_part - curvature.weyl(g)


def warped_radial_residuals(eps, psi: ScalarField, c, fiber_dim: int, f: ScalarField, lam, variable="t"):
    """
    翘曲积 εdt² + ψ(t)² g_N 上径向势函数满足的两个常微分关系

    f'' − ελ − (n+1)ψ''/ψ
    εψψ'f' − λψ² + nc − ε(ψψ'' + n ψ'²)

    其中 n = fiber_dim − 1。

    返回：
    - (ScalarField, ScalarField)
    """
    n = fiber_dim - 1
    eps = sp.sympify(eps)
    c = sp.sympify(c)
    lam = sp.sympify(lam)
    d_psi = psi.partial(variable)
    dd_psi = d_psi.partial(variable)
    d_f = f.partial(variable)
    first = d_f.partial(variable) - eps * lam - (n + 1) * dd_psi / psi
    second = eps * psi * d_psi * d_f - lam * psi ** 2 + n * c - eps * (psi * dd_psi + n * d_psi ** 2)
    return first, second


def max_norm(T: TensorField, point) -> tuple:
    """
    一点处张量分量的最大绝对值

    返回：
    - (value, index)：最大值与取到最大值的分量指标
    """
    values = np.abs(T.evaluate(point))
    if values.size == 0:
        return 0.0, ()
    flat = int(np.argmax(values))
    index = np.unravel_index(flat, values.shape)
    return float(values[index]), tuple(int(i) for i in index)
