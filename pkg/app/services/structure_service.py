"""
结构性检查：Ricci 特征向量、∇f 的因果类型、波结构（pr/pp-wave 条件与递归零向量场）、
张量递归性、各向同性以及 pp-wave 闭式

这些检查在点上用数值线性代数完成（numpy），输入的符号张量先在点上求值。
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence
import numpy as np
import sympy as sp
from app.config import settings
from app.errors import NotNull, ZeroGradient, ZeroTensor
from app.models.geometry import MetricField, TensorField
from app.models.soliton import SolitonInstance
from app.services import curvature_service as curvature

logger = logging.getLogger(__name__)


# ---- 点上的标架 ----

def orthogonal_complement(g_point: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """
    ∇f^⊥ 的一组基（行向量）

    以 |g(e_i, X)| 最大的坐标向量 e_p 为主元，Y_i = e_i − g(e_i,X)/g(e_p,X)·e_p（i ≠ p），
    每个 Y_i 再做欧氏归一化。X 为零向量时抛出 ValueError。
    """
    dim = len(vector)
    pairing = g_point @ vector
    pivot = int(np.argmax(np.abs(pairing)))
    if abs(pairing[pivot]) == 0.0:
        raise ValueError("向量为零，没有正交补")
    basis = []
    for i in range(dim):
        if i == pivot:
            continue
        y = np.zeros(dim)
        y[i] = 1.0
        y[pivot] -= pairing[i] / pairing[pivot]
        basis.append(y / np.linalg.norm(y))
    return np.array(basis)


def pseudo_orthonormal_frame(g_point: np.ndarray, V: np.ndarray):
    """
    类光向量 V 的伪正交标架 {U, V, E_1, …, E_n}

    U 类光且 g(U, V) = 1，E_i 与 U、V 正交且单位类空。
    与把 V 拆成 S + T（g(S,S) = −g(T,T) = ½）再取 U = S − T 的构造给出同一类标架。

    返回：
    - (U, E)：U 为向量，E 为 n×dim 数组
    """
    dim = len(V)
    pairing = g_point @ V
    pivot = int(np.argmax(np.abs(pairing)))
    if abs(pairing[pivot]) == 0.0:
        raise ValueError("类光向量为零")
    W = np.zeros(dim)
    W[pivot] = 1.0 / pairing[pivot]
    U = W - 0.5 * float(W @ g_point @ W) * V

    frame = []
    for i in range(dim):
        x = np.zeros(dim)
        x[i] = 1.0
        x = x - float(x @ g_point @ U) * V - float(x @ g_point @ V) * U
        for e in frame:
            x = x - float(x @ g_point @ e) * e
        norm2 = float(x @ g_point @ x)
        if norm2 > 1e-10:
            frame.append(x / np.sqrt(norm2))
        if len(frame) == dim - 2:
            break
    return U, np.array(frame).reshape(len(frame), dim)


# ---- Ricci 特征向量 ----

@dataclass
class EigenvectorReport:
    residual: float = 0.0
    null_residual: float = 0.0
    worst_point: Optional[tuple] = None
    evaluated: int = 0
    skipped: list = field(default_factory=list)


def ricci_eigenvector_check(inst: SolitonInstance, points: Sequence) -> EigenvectorReport:
    """
    检查 ∇f 是 Ricci 算子的特征向量：对 ∇f^⊥ 的基 {Y} 验证 ρ(Y, ∇f) = 0；
    在 ∇f 类光的点上再验证 Ric(∇f) = λ∇f

    ∇f = 0 的点记入 skipped（ZeroGradient），不参与残差。
    """
    g = inst.metric
    grad_f = curvature.gradient(inst.potential, g)
    rho = curvature.ricci(g)
    ric = curvature.ricci_operator(g)
    lam = float(inst.lam)
    report = EigenvectorReport()
    for point in points:
        try:
            value = _eigenvector_residual(g, grad_f, rho, ric, lam, point, inst.null_dead_band)
        except ZeroGradient as e:
            report.skipped.append(e.detail)
            logger.debug(e.detail)
            continue
        report.evaluated += 1
        residual, null_residual = value
        if max(residual, null_residual) > max(report.residual, report.null_residual):
            report.worst_point = tuple(float(p) for p in point)
        report.residual = max(report.residual, residual)
        report.null_residual = max(report.null_residual, null_residual)
    return report


def _eigenvector_residual(g, grad_f, rho, ric, lam, point, dead_band):
    X = grad_f.evaluate(point)
    if np.max(np.abs(X)) < dead_band:
        raise ZeroGradient(point)
    g_point = g.evaluate(point)
    rho_point = rho.evaluate(point)
    residual = 0.0
    for Y in orthogonal_complement(g_point, X):
        residual = max(residual, abs(float(Y @ rho_point @ X)))
    null_residual = 0.0
    if abs(float(X @ g_point @ X)) < dead_band:
        null_residual = float(np.max(np.abs(ric.evaluate(point) @ X - lam * X)))
    return residual, null_residual


# ---- 因果类型 ----

def causal_character(inst: SolitonInstance, point) -> str:
    """
    ∇f 在一点的因果类型：timelike | null | spacelike | zero

    |g(∇f,∇f)| 小于死区时为 null；全部分量都小于死区时为 zero。
    """
    g = inst.metric
    X = curvature.gradient(inst.potential, g).evaluate(point)
    band = inst.null_dead_band
    if np.max(np.abs(X)) < band:
        return "zero"
    norm2 = float(X @ g.evaluate(point) @ X)
    if abs(norm2) < band:
        return "null"
    return "timelike" if norm2 < 0 else "spacelike"


# ---- 波结构 ----

@dataclass
class WaveStructureReport:
    pr_wave: float = 0.0            # max |R(X, Y, ·, ·)|，X, Y ∈ V^⊥
    degenerate: float = 0.0         # max |R(V, Y, ·, ·)|，Y ∈ V^⊥
    parallel: float = 0.0           # max |∇V|
    recurrence: float = 0.0         # max |∇_e V − σ_e V|（相对值）
    sigma_pattern: float = 0.0      # max |σ(U) + ρ(U,U)|（相对值）
    sigma_transverse: float = 0.0   # max |σ(V)|、|σ(E_i)|
    evaluated: int = 0
    skipped: list = field(default_factory=list)

    @property
    def is_pr_wave(self) -> bool:
        return self.pr_wave <= settings.TOL_SYMBOLIC and self.degenerate <= settings.TOL_SYMBOLIC


def wave_structure_check(
    g: MetricField,
    V: TensorField,
    points: Sequence,
    dead_band: float = settings.NULL_DEAD_BAND,
) -> WaveStructureReport:
    """
    以类光向量场 V 张成的线场 𝒟 检查波结构

    - pr-wave 条件：R(𝒟^⊥, 𝒟^⊥, ·, ·) = 0，以及 R(𝒟, 𝒟^⊥, ·, ·) = 0
    - 递归性：∇_X V = σ(X) V，σ 由 σ_e = g(∇_e V, U) 给出（g(U, V) = 1）
    - σ 的模式：σ(U) = −ρ(U, U)，σ(V) = σ(E_i) = 0

    异常：
    - NotNull: 某个采样点上 |g(V,V)| ≥ 死区
    """
    R = curvature.riemann(g)
    rho = curvature.ricci(g)
    nabla_V = curvature.covariant_derivative(V, g)
    report = WaveStructureReport()
    for point in points:
        g_point = g.evaluate(point)
        v = V.evaluate(point)
        norm2 = float(v @ g_point @ v)
        if abs(norm2) >= dead_band:
            raise NotNull(norm2)
        if np.max(np.abs(v)) < dead_band:
            report.skipped.append(f"点 {tuple(point)} 处 V = 0")
            continue
        U, E = pseudo_orthonormal_frame(g_point, v)
        perp = np.vstack([v[None, :], E]) if len(E) else v[None, :]
        R_point = R.evaluate(point)
        R_uv = np.einsum("abcd,ia,jb->ijcd", R_point, perp, perp)
        report.pr_wave = max(report.pr_wave, float(np.max(np.abs(R_uv))))
        R_v = np.einsum("abcd,a,jb->jcd", R_point, v, perp)
        report.degenerate = max(report.degenerate, float(np.max(np.abs(R_v))))

        # (∇V)^a_{;e}：第 e 列是 ∇_{∂e} V
        nv = nabla_V.evaluate(point)
        report.parallel = max(report.parallel, float(np.max(np.abs(nv))))
        sigma = np.array([float(nv[:, e] @ g_point @ U) for e in range(len(v))])
        scale = max(1.0, float(np.max(np.abs(nv))))
        misfit = nv - np.outer(v, sigma)
        report.recurrence = max(report.recurrence, float(np.max(np.abs(misfit))) / scale)

        rho_point = rho.evaluate(point)
        rho_uu = float(U @ rho_point @ U)
        sigma_u = float(sigma @ U)
        report.sigma_pattern = max(report.sigma_pattern, abs(sigma_u + rho_uu) / max(1.0, abs(rho_uu)))
        transverse = [abs(float(sigma @ v))] + [abs(float(sigma @ e)) for e in E]
        report.sigma_transverse = max(report.sigma_transverse, max(transverse))
        report.evaluated += 1
    return report


# ---- 递归性 ----

@dataclass
class RecurrenceResult:
    kind: str                         # parallel | recurrent | neither
    max_tensor: float
    max_derivative: float
    max_relative_residual: float
    sigmas: list = field(default_factory=list)


def recurrence_check(T: TensorField, g: MetricField, points: Sequence) -> RecurrenceResult:
    """
    判定 ∇T = σ⊗T

    每个点上用最小二乘求 σ（设计矩阵为 T 的分量列向量）；
    max|∇T| < PARALLEL_TOL 时为 parallel；各点相对残差 < RECURRENCE_REL_TOL
    且某个 |σ| > SIGMA_MIN 时为 recurrent；否则为 neither。

    异常：
    - ZeroTensor: 所有采样点上 max|T| < ZERO_TENSOR_TOL
    """
    nabla = curvature.covariant_derivative(T, g)
    dim = g.dimension
    max_tensor = 0.0
    max_derivative = 0.0
    max_relative = 0.0
    sigmas = []
    for point in points:
        t = T.evaluate(point).reshape(-1)
        nt = nabla.evaluate(point).reshape(-1, dim)
        max_tensor = max(max_tensor, float(np.max(np.abs(t))))
        size = float(np.max(np.abs(nt)))
        max_derivative = max(max_derivative, size)
        if float(np.max(np.abs(t))) < settings.ZERO_TENSOR_TOL:
            sigmas.append(np.zeros(dim))
            if size >= settings.PARALLEL_TOL:
                max_relative = max(max_relative, 1.0)
            continue
        sigma, *_ = np.linalg.lstsq(t[:, None], nt, rcond=None)
        sigma = sigma.reshape(-1)
        sigmas.append(sigma)
        if size >= settings.PARALLEL_TOL:
            misfit = float(np.max(np.abs(nt - np.outer(t, sigma))))
            max_relative = max(max_relative, misfit / size)
    if max_tensor < settings.ZERO_TENSOR_TOL:
        raise ZeroTensor()
    if max_derivative < settings.PARALLEL_TOL:
        kind = "parallel"
    elif max_relative < settings.RECURRENCE_REL_TOL and any(
        float(np.max(np.abs(s))) > settings.SIGMA_MIN for s in sigmas
    ):
        kind = "recurrent"
    else:
        kind = "neither"
    logger.debug(f"递归性判定: {kind}, max|∇T|={max_derivative:.3e}, 相对残差={max_relative:.3e}")
    return RecurrenceResult(kind, max_tensor, max_derivative, max_relative, sigmas)


# ---- 各向同性 ----

@dataclass
class IsotropyReport:
    lam: float = 0.0
    scalar_curvature: float = 0.0
    ricci_square: float = 0.0
    isotropic_image: float = 0.0
    gradient_norm: float = 0.0

    @property
    def residual(self) -> float:
        return max(abs(self.lam), self.scalar_curvature, self.ricci_square, self.isotropic_image, self.gradient_norm)


def isotropy_check(inst: SolitonInstance, points: Sequence) -> IsotropyReport:
    """
    各向同性局部共形平坦孤立子的结构：λ = 0、τ = 0、Ric² = 0、
    Ric 的像完全迷向（g(Ric X, Ric Y) = 0）以及 ‖∇f‖² = 0
    """
    g = inst.metric
    tau = curvature.scalar_curvature(g)
    ric = curvature.ricci_operator(g)
    grad_f = curvature.gradient(inst.potential, g)
    report = IsotropyReport(lam=float(inst.lam))
    for point in points:
        g_point = g.evaluate(point)
        ric_point = ric.evaluate(point)
        X = grad_f.evaluate(point)
        report.scalar_curvature = max(report.scalar_curvature, abs(tau.evaluate(point)))
        report.ricci_square = max(report.ricci_square, float(np.max(np.abs(ric_point @ ric_point))))
        image = ric_point.T @ g_point @ ric_point
        report.isotropic_image = max(report.isotropic_image, float(np.max(np.abs(image))))
        report.gradient_norm = max(report.gradient_norm, abs(float(X @ g_point @ X)))
    return report


# ---- pp-wave 闭式 ----

def pp_wave_profile(g: MetricField):
    """pp-wave 坐标 (u, v, x_1, …, x_n) 下的剖面函数 H = g_uu"""
    return g.entry(0, 0)


def pp_wave_christoffel(g: MetricField) -> TensorField:
    """
    pp-wave 联络的闭式：
    ∇_u ∂_u = ½∂_uH ∂_v − ½Σ∂_iH ∂_i，∇_u ∂_i = ½∂_iH ∂_v，其余为零
    """
    H = pp_wave_profile(g)
    syms = g.chart.symbols
    half = sp.Rational(1, 2)

    def component(k, i, j):
        pair = tuple(sorted((i, j)))
        if pair == (0, 0):
            if k == 1:
                return half * H.partial(syms[0]).expr
            if k >= 2:
                return -half * H.partial(syms[k]).expr
        if pair[0] == 0 and pair[1] >= 2 and k == 1:
            return half * H.partial(syms[pair[1]]).expr
        return 0

    return TensorField.from_function(g.chart, ("u", "l", "l"), component)


def pp_wave_riemann(g: MetricField) -> TensorField:
    """pp-wave 曲率闭式 R_uiuj = −½ ∂²_ij H（连同曲率对称性），其余为零"""
    H = pp_wave_profile(g)
    syms = g.chart.symbols

    def hij(i, j):
        return -sp.Rational(1, 2) * sp.diff(H.expr, syms[i], syms[j])

    def component(a, b, c, d):
        transverse = lambda *idx: all(k >= 2 for k in idx)
        if a == 0 and c == 0 and transverse(b, d):
            return hij(b, d)
        if b == 0 and d == 0 and transverse(a, c):
            return hij(a, c)
        if a == 0 and d == 0 and transverse(b, c):
            return -hij(b, c)
        if b == 0 and c == 0 and transverse(a, d):
            return -hij(a, d)
        return 0

    return TensorField.from_function(g.chart, ("l", "l", "l", "l"), component)


def pp_wave_ricci(g: MetricField) -> TensorField:
    """pp-wave Ricci 闭式 ρ_uu = −½ Σ ∂²_ii H，其余为零"""
    H = pp_wave_profile(g)
    syms = g.chart.symbols
    rho_uu = -sp.Rational(1, 2) * sp.Add(*(sp.diff(H.expr, s, 2) for s in syms[2:]))
    return TensorField.from_function(
        g.chart, ("l", "l"), lambda a, b: rho_uu if a == 0 and b == 0 else 0
    )


@dataclass
class ClosedFormReport:
    christoffel: float = 0.0
    riemann: float = 0.0
    ricci: float = 0.0
    scalar_curvature: float = 0.0
    ricci_flat_expected: bool = False

    @property
    def residual(self) -> float:
        return max(self.christoffel, self.riemann, self.ricci, self.scalar_curvature)


def pp_wave_closed_forms(g: MetricField, points: Sequence) -> ClosedFormReport:
    """
    比较引擎结果与 pp-wave 闭式：联络、曲率、Ricci 与 τ = 0

    ricci_flat_expected 记录横向 Laplace ΣH_ii 是否恒为零（此时 pp-wave 是 Ricci 平坦的）。
    """
    diff_gamma = curvature.christoffel(g) - pp_wave_christoffel(g)
    diff_R = curvature.riemann(g) - pp_wave_riemann(g)
    expected_rho = pp_wave_ricci(g)
    diff_rho = curvature.ricci(g) - expected_rho
    tau = curvature.scalar_curvature(g)
    report = ClosedFormReport(ricci_flat_expected=sp.simplify(expected_rho.components[0, 0]) == 0)
    for point in points:
        report.christoffel = max(report.christoffel, float(np.max(np.abs(diff_gamma.evaluate(point)))))
        report.riemann = max(report.riemann, float(np.max(np.abs(diff_R.evaluate(point)))))
        report.ricci = max(report.ricci, float(np.max(np.abs(diff_rho.evaluate(point)))))
        report.scalar_curvature = max(report.scalar_curvature, abs(tau.evaluate(point)))
    return report


