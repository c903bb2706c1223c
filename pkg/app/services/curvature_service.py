"""
曲率服务：Christoffel 符号、Riemann/Ricci/数量曲率、Schouten 与 Weyl 张量、
梯度/Hessian/Laplace、度量的 Lie 导数、张量场的协变导数

指标约定（由 pp-wave 闭式标定）：
- Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)，存放为 [k, i, j]
- R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb
- R_abcd = g_ae R^e_bcd，ρ_bd = R^a_bad，τ = g^bd ρ_bd
- 协变导数把求导槽位追加在最后：(∇T)_{i1…ik; e}

在此约定下 pp-wave 满足 R_uiuj = −½ ∂²_ij H、ρ_uu = −½ Σ ∂²_ii H，
常曲率 c 的空间满足 R = (c/2) g⊙g。

所有算子返回符号分量场，只在报告阶段求值；结果按 (度量, 张量) 对象缓存。
"""
import itertools
import logging
from collections import defaultdict
from functools import lru_cache
import numpy as np
import sympy as sp
from app.errors import DimensionError
from app.models.geometry import MetricField, TensorField
from app.models.scalar_field import ScalarField
from app.services.geometry_service import kulkarni_nomizu, raise_index

logger = logging.getLogger(__name__)

_CACHE_SIZE = 64


def _tidy(expr) -> sp.Expr:
    """把有理组合约成单个分式；只用于抑制表达式膨胀，不追求规范形"""
    if expr == 0:
        return sp.Integer(0)
    return sp.cancel(expr)


def _tidy_tensor(T: TensorField) -> TensorField:
    out = np.empty(T.components.shape, dtype=object)
    for idx in np.ndindex(*T.components.shape):
        out[idx] = _tidy(T.components[idx])
    return TensorField(T.chart, T.index_types, out)


def _filled(shape) -> np.ndarray:
    array = np.empty(shape, dtype=object)
    array.fill(sp.Integer(0))
    return array


@lru_cache(maxsize=_CACHE_SIZE)
def christoffel(g: MetricField) -> TensorField:
    """
    第二类 Christoffel 符号 Γ^k_ij（关于 i, j 对称）

    异常：
    - DegenerateMetric: 度量行列式恒为零
    """
    dim = g.dimension
    syms = g.chart.symbols
    G = g.components
    inv = g.inverse_components
    dG = [[[sp.diff(G[i, j], syms[l]) for j in range(dim)] for i in range(dim)] for l in range(dim)]

    first = _filled((dim, dim, dim))
    for l, i, j in itertools.product(range(dim), repeat=3):
        if j < i:
            first[l, i, j] = first[l, j, i]
            continue
        value = dG[i][j][l] + dG[j][i][l] - dG[l][i][j]
        if value != 0:
            first[l, i, j] = value / 2

    out = _filled((dim, dim, dim))
    for k, i, j in itertools.product(range(dim), repeat=3):
        if j < i:
            out[k, i, j] = out[k, j, i]
            continue
        terms = [inv[k, l] * first[l, i, j] for l in range(dim) if inv[k, l] != 0 and first[l, i, j] != 0]
        out[k, i, j] = _tidy(sp.Add(*terms))
    logger.debug(f"Christoffel 符号计算完成: 维数={dim}")
    return TensorField(g.chart, ("u", "l", "l"), out)


@lru_cache(maxsize=_CACHE_SIZE)
def riemann_mixed(g: MetricField) -> TensorField:
    """(1,3) 型曲率张量 R^a_bcd"""
    dim = g.dimension
    syms = g.chart.symbols
    gamma = christoffel(g).components
    out = _filled((dim, dim, dim, dim))
    for a, b, c, d in itertools.product(range(dim), repeat=4):
        if c >= d:
            continue
        terms = []
        if gamma[a, d, b] != 0:
            terms.append(sp.diff(gamma[a, d, b], syms[c]))
        if gamma[a, c, b] != 0:
            terms.append(-sp.diff(gamma[a, c, b], syms[d]))
        for e in range(dim):
            if gamma[a, c, e] != 0 and gamma[e, d, b] != 0:
                terms.append(gamma[a, c, e] * gamma[e, d, b])
            if gamma[a, d, e] != 0 and gamma[e, c, b] != 0:
                terms.append(-gamma[a, d, e] * gamma[e, c, b])
        value = _tidy(sp.Add(*terms))
        out[a, b, c, d] = value
        out[a, b, d, c] = -value
    return TensorField(g.chart, ("u", "l", "l", "l"), out)


@lru_cache(maxsize=_CACHE_SIZE)
def riemann(g: MetricField) -> TensorField:
    """全协变曲率张量 R_abcd = g_ae R^e_bcd"""
    dim = g.dimension
    G = g.components
    mixed = riemann_mixed(g).components
    out = _filled((dim, dim, dim, dim))
    for a, b, c, d in itertools.product(range(dim), repeat=4):
        if c >= d:
            continue
        terms = [G[a, e] * mixed[e, b, c, d] for e in range(dim) if G[a, e] != 0 and mixed[e, b, c, d] != 0]
        value = _tidy(sp.Add(*terms))
        out[a, b, c, d] = value
        out[a, b, d, c] = -value
    logger.debug(f"曲率张量计算完成: 维数={dim}")
    return TensorField(g.chart, ("l", "l", "l", "l"), out)


@lru_cache(maxsize=_CACHE_SIZE)
def ricci(g: MetricField) -> TensorField:
    """Ricci 张量 ρ_bd = R^a_bad"""
    dim = g.dimension
    mixed = riemann_mixed(g).components
    out = _filled((dim, dim))
    for b, d in itertools.product(range(dim), repeat=2):
        if d < b:
            out[b, d] = out[d, b]
            continue
        out[b, d] = _tidy(sp.Add(*(mixed[a, b, a, d] for a in range(dim))))
    return TensorField(g.chart, ("l", "l"), out)


@lru_cache(maxsize=_CACHE_SIZE)
def ricci_operator(g: MetricField) -> TensorField:
    """Ricci 算子 Ric^a_b = g^ac ρ_cb，满足 g(Ric(X), Y) = ρ(X, Y)"""
    return _tidy_tensor(raise_index(ricci(g), g, 0))


@lru_cache(maxsize=_CACHE_SIZE)
def scalar_curvature(g: MetricField) -> ScalarField:
    """数量曲率 τ = g^bd ρ_bd"""
    dim = g.dimension
    inv = g.inverse_components
    rho = ricci(g).components
    terms = [
        inv[b, d] * rho[b, d]
        for b, d in itertools.product(range(dim), repeat=2)
        if inv[b, d] != 0 and rho[b, d] != 0
    ]
    return ScalarField(_tidy(sp.Add(*terms)), g.chart.symbols)


@lru_cache(maxsize=_CACHE_SIZE)
def schouten(g: MetricField) -> TensorField:
    """
    Schouten 张量 C = (1/n)(ρ − τ/(2(n+1)) g)，n = 维数 − 2

    异常：
    - DimensionError: 维数 < 3
    """
    n = g.chart.n
    if n < 1:
        raise DimensionError(g.dimension, 3)
    tau = scalar_curvature(g).expr
    rho = ricci(g).components
    G = g.components
    factor = tau / (2 * (n + 1))
    return TensorField.from_function(
        g.chart, ("l", "l"), lambda a, b: _tidy((rho[a, b] - factor * G[a, b]) / n)
    )


@lru_cache(maxsize=_CACHE_SIZE)
def weyl(g: MetricField) -> TensorField:
    """
    Weyl 张量 W = R − C⊙g

    异常：
    - DimensionError: 维数 < 3
    """
    C = schouten(g)
    return _tidy_tensor(riemann(g) - kulkarni_nomizu(C, g.as_tensor()))


def differential(f: ScalarField, g: MetricField) -> TensorField:
    """df（协变分量 ∂_a f）"""
    f = g.chart.scalar(f)
    return TensorField.from_function(g.chart, ("l",), lambda a: f.partial(g.chart.symbols[a]))


@lru_cache(maxsize=_CACHE_SIZE)
def gradient(f: ScalarField, g: MetricField) -> TensorField:
    """梯度 ∇f^a = g^ab ∂_b f"""
    return raise_index(differential(f, g), g, 0)


@lru_cache(maxsize=_CACHE_SIZE)
def hessian(f: ScalarField, g: MetricField) -> TensorField:
    """Hessian Hes_f(X,Y) = g(∇_X ∇f, Y)，分量 ∂_a∂_b f − Γ^k_ab ∂_k f"""
    f = g.chart.scalar(f)
    dim = g.dimension
    syms = g.chart.symbols
    gamma = christoffel(g).components
    df = [f.partial(s).expr for s in syms]
    out = _filled((dim, dim))
    for a, b in itertools.product(range(dim), repeat=2):
        if b < a:
            out[a, b] = out[b, a]
            continue
        terms = [sp.diff(df[a], syms[b])]
        terms += [-gamma[k, a, b] * df[k] for k in range(dim) if gamma[k, a, b] != 0 and df[k] != 0]
        out[a, b] = sp.Add(*terms)
    return TensorField(g.chart, ("l", "l"), out)


def laplacian(f: ScalarField, g: MetricField) -> ScalarField:
    """Δf = trace_g Hes_f"""
    inv = g.inverse_components
    H = hessian(f, g).components
    dim = g.dimension
    terms = [
        inv[a, b] * H[a, b]
        for a, b in itertools.product(range(dim), repeat=2)
        if inv[a, b] != 0 and H[a, b] != 0
    ]
    return ScalarField(sp.Add(*terms), g.chart.symbols)


def lie_derivative_metric(X: TensorField, g: MetricField) -> TensorField:
    """
    度量沿向量场的 Lie 导数

    (𝓛_X g)_ab = X^c ∂_c g_ab + g_cb ∂_a X^c + g_ac ∂_b X^c
    """
    if X.index_types != ("u",):
        raise ValueError(f"Lie 导数要求逆变向量场，收到 {X.index_types}")
    dim = g.dimension
    syms = g.chart.symbols
    G = g.components
    x = X.components
    dX = [[sp.diff(x[c], syms[a]) for c in range(dim)] for a in range(dim)]
    out = _filled((dim, dim))
    for a, b in itertools.product(range(dim), repeat=2):
        if b < a:
            out[a, b] = out[b, a]
            continue
        terms = []
        for c in range(dim):
            if x[c] != 0:
                terms.append(x[c] * sp.diff(G[a, b], syms[c]))
            if G[c, b] != 0 and dX[a][c] != 0:
                terms.append(G[c, b] * dX[a][c])
            if G[a, c] != 0 and dX[b][c] != 0:
                terms.append(G[a, c] * dX[b][c])
        out[a, b] = sp.Add(*terms)
    return TensorField(g.chart, ("l", "l"), out)


@lru_cache(maxsize=_CACHE_SIZE)
def covariant_derivative(T: TensorField, g: MetricField, tidy: bool = True) -> TensorField:
    """
    协变导数 ∇T，新增的协变槽位放在最后

    下指标槽位减去 Γ^m_{e i} T_{…m…}，上指标槽位加上 Γ^i_{e m} T^{…m…}；
    只遍历非零分量与非零 Christoffel 符号。可以复合（∇² = ∇∘∇）。
    """
    if T.rank > 5:
        raise ValueError(f"协变导数最多支持 5 阶张量，收到 {T.rank} 阶")
    dim = g.dimension
    syms = g.chart.symbols
    gamma = christoffel(g).components
    nonzero_gamma = defaultdict(list)
    for m, e, i in itertools.product(range(dim), repeat=3):
        if gamma[m, e, i] != 0:
            nonzero_gamma[(e, i)].append(m)

    terms = defaultdict(list)
    for idx in T.nonzero_indices:
        value = T.components[idx]
        for e in range(dim):
            terms[idx + (e,)].append(sp.diff(value, syms[e]))
            for slot, kind in enumerate(T.index_types):
                i = idx[slot]
                if kind == "l":
                    # T_{…i…} 贡献到输出指标 (…p…; e)，系数 −Γ^i_{e p}
                    for p in range(dim):
                        if gamma[i, e, p] != 0:
                            target = idx[:slot] + (p,) + idx[slot + 1:] + (e,)
                            terms[target].append(-gamma[i, e, p] * value)
                else:
                    # T^{…i…} 贡献到输出指标 (…q…; e)，系数 +Γ^q_{e i}
                    for q in nonzero_gamma[(e, i)]:
                        target = idx[:slot] + (q,) + idx[slot + 1:] + (e,)
                        terms[target].append(gamma[q, e, i] * value)

    out = _filled((dim,) * (T.rank + 1))
    for target, parts in terms.items():
        value = sp.Add(*parts)
        out[target] = _tidy(value) if tidy else value
    return TensorField(g.chart, T.index_types + ("l",), out)


def divergence(T: TensorField, g: MetricField) -> TensorField:
    """(0,2) 张量的散度 (div T)_a = g^bc (∇T)_{b a; c}"""
    if T.index_types != ("l", "l"):
        raise ValueError(f"散度要求 (0,2) 张量，收到 {T.index_types}")
    dim = g.dimension
    inv = g.inverse_components
    nabla = covariant_derivative(T, g).components

    def component(a):
        return sp.Add(*(
            inv[b, c] * nabla[b, a, c]
            for b, c in itertools.product(range(dim), repeat=2)
            if inv[b, c] != 0 and nabla[b, a, c] != 0
        ))

    return TensorField.from_function(g.chart, ("l",), component)


