"""
验证服务：在采样点上运行检查目录并汇总为 VerificationReport

- 采样点由 (seed, 采样盒) 完全决定；在某点求值落到定义域外（DomainError）时，
  按 (seed, 点序号, 第几次) 重新抽样，最多 MAX_RESAMPLE 次，仍失败则记入该检查的 errors
- 每项检查是否适用由实例数据（势函数、向量场、维数）与族声明的 expectations 决定
- 报告按检查目录顺序排列，与运行顺序无关
"""
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Sequence
import numpy as np
import sympy as sp
from app.config import settings
from app.errors import ConfigError, DomainError, SolitonVerifyError
from app.models.geometry import TensorField
from app.models.scalar_field import ScalarField
from app.models.soliton import MetricInstance, SolitonInstance, format_param
from app.schemas.request import MetricDescriptor, RunConfig
from app.schemas.response import CheckResult, VerificationReport
from app.services import completeness_service as completeness
from app.services import curvature_service as curvature
from app.services import registry_service as registry
from app.services import soliton_service as soliton
from app.services import structure_service as structure
from app.services.geometry_service import kulkarni_nomizu, metric_invariants
from app.utils.expression import format_expression, parse_expression
from app.utils.sampling import resample_point, sample_points
from app.utils.validation import CHECK_NAMES

logger = logging.getLogger(__name__)


# ---- 采样与逐点求值 ----

@dataclass
class Sweep:
    """一次逐点扫描的结果：最大值、取到最大值的分量与点"""
    value: float = 0.0
    component: Optional[tuple] = None
    point: Optional[tuple] = None
    evaluated: int = 0
    errors: List[str] = field(default_factory=list)
    points: List[np.ndarray] = field(default_factory=list)


@dataclass
class VerifyContext:
    inst: MetricInstance
    points: np.ndarray
    seed: int
    tolerances: Dict[str, float] = field(default_factory=dict)

    @property
    def box(self) -> tuple:
        return self.inst.box

    def tolerance(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)

    def sweep(self, fn: Callable) -> Sweep:
        """
        对每个采样点调用 fn(point) -> (value, component)，取最大值

        DomainError 时按 (seed, 点序号, 第几次) 重新抽样，最多 MAX_RESAMPLE 次。
        """
        result = Sweep()
        for index, point in enumerate(self.points):
            candidate = point
            for attempt in range(settings.MAX_RESAMPLE + 1):
                try:
                    value, component = fn(candidate)
                    break
                except DomainError as e:
                    if attempt == settings.MAX_RESAMPLE:
                        result.errors.append(f"点 #{index}: {e.detail}")
                        logger.warning(f"点 #{index} 重采样 {settings.MAX_RESAMPLE} 次后仍在定义域外")
                        candidate = None
                        break
                    candidate = resample_point(self.box, self.seed, index, attempt + 1)
            if candidate is None:
                continue
            result.evaluated += 1
            result.points.append(candidate)
            if result.point is None or value > result.value:
                result.value = float(value)
                result.component = component
                result.point = tuple(float(x) for x in candidate)
        return result

    def good_points(self) -> List[np.ndarray]:
        """可在其上求值度量的采样点（定义域外的点已按规则重采样）"""
        def probe(p):
            self.inst.metric.evaluate(p)
            return 0.0, None
        return self.sweep(probe).points


def tensor_probe(T: TensorField) -> Callable:
    return lambda p: soliton.max_norm(T, p)


def scalar_probe(f: ScalarField) -> Callable:
    return lambda p: (abs(f.evaluate(p)), ())


def _result(
    name: str,
    sweep: Sweep,
    tolerance: float,
    detail: str = "",
    extra_errors: Sequence[str] = (),
) -> CheckResult:
    """残差类检查：residual ≤ tolerance 为通过"""
    errors = list(sweep.errors) + list(extra_errors)
    if sweep.evaluated == 0:
        status = "error"
    else:
        status = "pass" if sweep.value <= tolerance else "fail"
    return CheckResult(
        name=name,
        status=status,
        residual=sweep.value if sweep.evaluated else None,
        tolerance=tolerance,
        points=sweep.evaluated,
        worst_component=list(sweep.component) if sweep.component is not None else None,
        worst_point=list(sweep.point) if sweep.point is not None else None,
        errors=errors,
        detail=detail,
    )


def _witness_result(name: str, sweep: Sweep, minimum: float, detail: str = "") -> CheckResult:
    """“非零”断言：max 幅度 ≥ minimum 为通过"""
    if sweep.evaluated == 0:
        status = "error"
    else:
        status = "pass" if sweep.value >= minimum else "fail"
    return CheckResult(
        name=name,
        status=status,
        witness=sweep.value if sweep.evaluated else None,
        witness_min=minimum,
        points=sweep.evaluated,
        worst_component=list(sweep.component) if sweep.component is not None else None,
        worst_point=list(sweep.point) if sweep.point is not None else None,
        errors=list(sweep.errors),
        detail=detail,
    )


def _combine(name: str, parts: List[CheckResult], detail: str = "") -> CheckResult:
    """把同一检查的多个子项合并：任一子项失败即失败，残差取最大"""
    order = {"error": 3, "fail": 2, "pass": 1, "skipped": 0}
    worst = max(parts, key=lambda r: order[r.status])
    residual_parts = [p for p in parts if p.residual is not None]
    witness_parts = [p for p in parts if p.witness is not None]
    top = max(residual_parts, key=lambda r: r.residual / r.tolerance, default=None)
    lowest = min(witness_parts, key=lambda r: r.witness / r.witness_min, default=None)
    located = worst if worst.worst_point is not None else (top or worst)
    details = [p.detail for p in parts if p.detail]
    if detail:
        details.insert(0, detail)
    return CheckResult(
        name=name,
        status=worst.status,
        residual=top.residual if top else None,
        tolerance=top.tolerance if top else None,
        witness=lowest.witness if lowest else None,
        witness_min=lowest.witness_min if lowest else None,
        points=min((p.points for p in parts if p.points), default=0),
        worst_component=located.worst_component,
        worst_point=located.worst_point,
        errors=[e for p in parts for e in p.errors],
        detail="；".join(details),
    )


# ---- 适用性 ----

def _need_soliton(inst) -> Optional[str]:
    return None if inst.is_soliton else "实例没有孤立子数据"


def _need_gradient(inst) -> Optional[str]:
    return None if inst.is_gradient else "需要势函数（梯度孤立子）"


def _need_expectation(key: str) -> Callable:
    def check(inst):
        return None if inst.expects(key) is not None else f"族没有声明 {key}"
    return check


def _need_dimension(minimum: int) -> Callable:
    def check(inst):
        return None if inst.metric.dimension >= minimum else f"维数 < {minimum}"
    return check


def _all(*conditions) -> Callable:
    def check(inst):
        for condition in conditions:
            reason = condition(inst)
            if reason:
                return reason
        return None
    return check


def _always(inst) -> Optional[str]:
    return None


# ---- 各项检查 ----

def check_metric(ctx: VerifyContext) -> CheckResult:
    g = ctx.inst.metric
    problems = []

    def probe(p):
        info = metric_invariants(g, p)
        if abs(info["det"]) <= settings.DET_MIN:
            problems.append(f"点 {tuple(round(float(x), 6) for x in p)} 处 |det g| = {abs(info['det']):.3e}")
        elif not info["signature_ok"]:
            problems.append(f"点 {tuple(round(float(x), 6) for x in p)} 处负特征值个数为 {info['negative']}")
        return info["symmetry"], ()

    sweep = ctx.sweep(probe)
    result = _result("metric", sweep, ctx.tolerance("metric", settings.SYMMETRY_TOL))
    if problems:
        result.status = "fail"
        result.errors.extend(problems[:5])
    result.detail = f"号差 {g.signature.value}"
    return result


def _soliton_tol(ctx: VerifyContext, name: str) -> float:
    return ctx.tolerance(name, settings.soliton_tolerance(ctx.inst.ode_fed))


def check_soliton(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    if inst.is_gradient:
        residual, label = soliton.gradient_soliton_residual(inst), "Hes_f + ρ − λg"
    else:
        residual, label = soliton.ricci_soliton_residual(inst), "½𝓛_X g + ρ − λg"
    sweep = ctx.sweep(tensor_probe(residual))
    return _result("soliton", sweep, _soliton_tol(ctx, "soliton"), f"{label}，{inst.classification}")


def check_ricci_soliton(ctx: VerifyContext) -> CheckResult:
    sweep = ctx.sweep(tensor_probe(soliton.ricci_soliton_residual(ctx.inst)))
    return _result("ricci_soliton", sweep, _soliton_tol(ctx, "ricci_soliton"), "½𝓛_X g + ρ − λg")


def check_trace(ctx: VerifyContext) -> CheckResult:
    sweep = ctx.sweep(scalar_probe(soliton.trace_residual(ctx.inst)))
    return _result("trace", sweep, _soliton_tol(ctx, "trace"), "Δf + τ − (n+2)λ")


def check_lemma(ctx: VerifyContext) -> CheckResult:
    """∇τ = 2Ric(∇f)，以及 τ + ‖∇f‖² − 2λf 为常数（取各点的极差）"""
    first, second = soliton.lemma_identities(ctx.inst)
    tol = _soliton_tol(ctx, "lemma")
    part1 = _result("lemma", ctx.sweep(tensor_probe(first)), tol, "∇τ − 2Ric(∇f)")
    values = []

    def probe(p):
        values.append(second.evaluate(p))
        return 0.0, ()

    sweep = ctx.sweep(probe)
    spread = Sweep(
        value=(max(values) - min(values)) if values else 0.0,
        component=(),
        point=sweep.point,
        evaluated=sweep.evaluated,
        errors=sweep.errors,
    )
    part2 = _result("lemma", spread, tol, "τ + ‖∇f‖² − 2λf 的极差")
    return _combine("lemma", [part1, part2])


def check_bianchi(ctx: VerifyContext) -> CheckResult:
    sweep = ctx.sweep(tensor_probe(soliton.bianchi_residual(ctx.inst.metric)))
    return _result("bianchi", sweep, _soliton_tol(ctx, "bianchi"), "dτ − 2 div ρ")


def check_geodesic(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    tol = _soliton_tol(ctx, "geodesic")
    parts = [_result("geodesic", ctx.sweep(tensor_probe(soliton.geodesic_residual(inst))), tol,
                     "∇_{∇f}∇f − (λ∇f − Ric(∇f))")]
    if inst.expects("pp_wave"):
        grad_f = curvature.gradient(inst.potential, inst.metric)
        nabla = curvature.covariant_derivative(grad_f, inst.metric).components
        dim = inst.metric.dimension
        along = TensorField.from_function(
            inst.chart, ("u",),
            lambda a: sp.Add(*(nabla[a, e] * grad_f.components[e] for e in range(dim))),
        )
        parts.append(_result("geodesic", ctx.sweep(tensor_probe(along)), tol, "∇_{∇f}∇f = 0"))
    return _combine("geodesic", parts)


def check_curv_identity(ctx: VerifyContext) -> CheckResult:
    sweep = ctx.sweep(tensor_probe(soliton.curv_identity_residual(ctx.inst)))
    return _result(
        "curv_identity", sweep, _soliton_tol(ctx, "curv_identity"),
        "R(X,Y,Z,∇f) + [ρ(X,∇f)g(Y,Z) − ρ(Y,∇f)g(X,Z)]/(n+1)",
    )


def check_codazzi(ctx: VerifyContext) -> CheckResult:
    """Schouten 张量的 Codazzi 条件；三维时它就是局部共形平坦的判据"""
    g = ctx.inst.metric
    sweep = ctx.sweep(tensor_probe(soliton.codazzi_schouten_residual(g)))
    if ctx.inst.expects("lcf"):
        return _result("codazzi", sweep, ctx.tolerance("codazzi", settings.TOL_SYMBOLIC), "(∇_a C)_bc − (∇_b C)_ac")
    return _witness_result("codazzi", sweep, settings.NON_LCF_MIN, "非局部共形平坦：Codazzi 残差非零")


def check_weyl(ctx: VerifyContext) -> CheckResult:
    sweep = ctx.sweep(tensor_probe(curvature.weyl(ctx.inst.metric)))
    if ctx.inst.metric.dimension == 3:
        return _result("weyl", sweep, ctx.tolerance("weyl", settings.TOL_WEYL), "三维 W ≡ 0：max|W|")
    if ctx.inst.expects("lcf"):
        return _result("weyl", sweep, ctx.tolerance("weyl", settings.TOL_WEYL), "max|W|")
    return _witness_result("weyl", sweep, settings.NON_LCF_MIN, "非局部共形平坦：max|W|")


def check_decomposition(ctx: VerifyContext) -> CheckResult:
    g = ctx.inst.metric
    sweep = ctx.sweep(tensor_probe(soliton.decomposition_residual(g)))
    traceless = soliton.traceless_ricci(g)
    einstein = ctx.sweep(tensor_probe(traceless))
    verdict = "Einstein" if einstein.value <= settings.TOL_SYMBOLIC else "非 Einstein"
    return _result(
        "decomposition", sweep, ctx.tolerance("decomposition", settings.TOL_SYMBOLIC),
        f"R = τ/(2(n+2)(n+1)) g⊙g + (1/n) ρ₀⊙g + W；{verdict}（max|ρ₀| = {einstein.value:.3e}）",
    )


def check_eigenvector(ctx: VerifyContext) -> CheckResult:
    points = ctx.good_points()
    report = structure.ricci_eigenvector_check(ctx.inst, points)
    sweep = Sweep(
        value=max(report.residual, report.null_residual),
        component=(),
        point=report.worst_point,
        evaluated=report.evaluated,
    )
    result = _result(
        "eigenvector", sweep, _soliton_tol(ctx, "eigenvector"),
        f"ρ(∇f^⊥, ∇f) = 0；类光点上 Ric(∇f) = λ∇f（跳过 ∇f = 0 的点 {len(report.skipped)} 个）",
    )
    if report.evaluated == 0 and report.skipped:
        result.status = "skipped"
    return result


def check_causal(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    expected = inst.expects("causal")
    norm_expected = inst.expects("gradient_norm")
    norm = soliton.squared_norm(curvature.gradient(inst.potential, inst.metric), inst.metric)
    mismatches = []
    zeros = []

    def probe(p):
        kind = structure.causal_character(inst, p)
        if kind == "zero":
            zeros.append(p)
        elif expected is not None and kind != expected:
            mismatches.append(f"点 {tuple(round(float(x), 6) for x in p)} 处 ∇f 为 {kind}")
        if norm_expected is None:
            return 0.0, ()
        return abs(norm.evaluate(p) - float(norm_expected)), ()

    sweep = ctx.sweep(probe)
    detail = f"期望 ∇f 为 {expected}" if expected else ""
    if norm_expected is not None:
        detail += f"，‖∇f‖² = {format_expression(sp.sympify(norm_expected))}"
    if zeros:
        detail += f"（∇f = 0 的点 {len(zeros)} 个不参与判定）"
    result = _result("causal", sweep, _soliton_tol(ctx, "causal"), detail)
    if mismatches:
        result.status = "fail"
        result.errors.extend(mismatches[:5])
    return result


def check_isotropy(ctx: VerifyContext) -> CheckResult:
    report = structure.isotropy_check(ctx.inst, ctx.good_points())
    sweep = Sweep(value=report.residual, component=(), evaluated=len(ctx.points))
    return _result(
        "isotropy", sweep, _soliton_tol(ctx, "isotropy"),
        f"λ = {report.lam:g}，max|τ| = {report.scalar_curvature:.3e}，max|Ric²| = {report.ricci_square:.3e}，"
        f"max|g(Ric·,Ric·)| = {report.isotropic_image:.3e}，max|‖∇f‖²| = {report.gradient_norm:.3e}",
    )


def check_wave_structure(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    g = inst.metric
    points = ctx.good_points()
    V = inst.expects("null_vector")
    report = structure.wave_structure_check(g, V, points, inst.null_dead_band)
    tol = ctx.tolerance("wave_structure", settings.TOL_SYMBOLIC)
    parts = []
    if inst.expects("pr_wave"):
        value = max(report.pr_wave, report.degenerate)
        parts.append(_result("wave_structure", Sweep(value, (), None, report.evaluated), tol,
                             "R(𝒟^⊥, 𝒟^⊥) = 0 且 R(𝒟, 𝒟^⊥) = 0"))
    else:
        parts.append(_witness_result("wave_structure", Sweep(report.pr_wave, (), None, report.evaluated),
                                     settings.NONVANISHING_MIN, "pr-wave 条件不成立：max|R(𝒟^⊥, 𝒟^⊥)|"))
    if inst.expects("pp_wave"):
        parts.append(_result("wave_structure", Sweep(report.parallel, (), None, report.evaluated), tol,
                             "∂v 平行"))
    if inst.is_gradient and inst.expects("isotropic"):
        grad_f = curvature.gradient(inst.potential, g)
        gradient_report = structure.wave_structure_check(g, grad_f, points, inst.null_dead_band)
        rel = ctx.tolerance("wave_structure", settings.RECURRENCE_REL_TOL)
        value = max(gradient_report.recurrence, gradient_report.sigma_pattern, gradient_report.sigma_transverse)
        parts.append(_result("wave_structure", Sweep(value, (), None, gradient_report.evaluated), rel,
                             "∇f 递归：∇∇f = σ⊗∇f，σ(U) = −ρ(U,U)，σ(V) = σ(E_i) = 0"))
    return _combine("wave_structure", parts)


def _sigma_misfit(expected: List[ScalarField], sigmas, points) -> float:
    worst = 0.0
    for sigma, point in zip(sigmas, points):
        target = np.array([s.evaluate(point) for s in expected])
        worst = max(worst, float(np.max(np.abs(sigma - target))) / max(1.0, float(np.max(np.abs(target)))))
    return worst


def check_recurrence(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    g = inst.metric
    points = ctx.good_points()
    parts = []
    for key, tensor, label in (
        ("curvature", curvature.riemann, "R"),
        ("ricci", curvature.ricci, "ρ"),
    ):
        expected = inst.expects(f"{key}_recurrence")
        if expected is None:
            continue
        result = structure.recurrence_check(tensor(g), g, points)
        detail = f"{label}: 期望 {expected}，判定 {result.kind}（max|∇{label}| = {result.max_derivative:.3e}）"
        misfit = result.max_relative_residual
        sigma = inst.expects(f"{key}_sigma")
        if sigma is not None and result.kind == "recurrent":
            misfit = max(misfit, _sigma_misfit(sigma, result.sigmas, points))
        part = _result("recurrence", Sweep(misfit, (), None, len(points)),
                       ctx.tolerance("recurrence", settings.RECURRENCE_REL_TOL), detail)
        if result.kind != expected:
            part.status = "fail"
        parts.append(part)
    return _combine("recurrence", parts)


def check_two_symmetric(ctx: VerifyContext) -> CheckResult:
    g = ctx.inst.metric
    nabla_R = curvature.covariant_derivative(curvature.riemann(g), g)
    nabla2_R = curvature.covariant_derivative(nabla_R, g)
    flat = _result("two_symmetric", ctx.sweep(tensor_probe(nabla2_R)),
                   ctx.tolerance("two_symmetric", settings.TOL_SYMBOLIC), "∇²R = 0")
    witness = _witness_result("two_symmetric", ctx.sweep(tensor_probe(nabla_R)),
                              settings.NONVANISHING_MIN, "∇R ≠ 0")
    return _combine("two_symmetric", [flat, witness])


def check_conformally_symmetric(ctx: VerifyContext) -> CheckResult:
    g = ctx.inst.metric
    W = curvature.weyl(g)
    parallel = _result("conformally_symmetric", ctx.sweep(tensor_probe(curvature.covariant_derivative(W, g))),
                       ctx.tolerance("conformally_symmetric", settings.TOL_SYMBOLIC), "∇W = 0")
    witness = _witness_result("conformally_symmetric", ctx.sweep(tensor_probe(W)),
                              settings.NONVANISHING_MIN, "W ≠ 0")
    return _combine("conformally_symmetric", [parallel, witness])


def _potential_shape_errors(inst: SolitonInstance) -> List[str]:
    """pp-wave 上的梯度孤立子必须形如 f₀(u) + Σκ_i x_i"""
    f = inst.potential
    syms = inst.chart.symbols
    errors = []
    if sp.simplify(sp.diff(f.expr, syms[1])) != 0:
        errors.append("势函数依赖 v")
    for x in syms[2:]:
        slope = sp.simplify(sp.diff(f.expr, x))
        if slope.free_symbols:
            errors.append(f"∂f/∂{x} = {format_expression(slope)} 不是常数")
    return errors


def check_closed_form(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    g = inst.metric
    tol = ctx.tolerance("closed_form", settings.TOL_CLOSED_FORM)
    parts = []
    if inst.expects("pp_wave"):
        diff_gamma = curvature.christoffel(g) - structure.pp_wave_christoffel(g)
        diff_R = curvature.riemann(g) - structure.pp_wave_riemann(g)
        diff_rho = curvature.ricci(g) - structure.pp_wave_ricci(g)
        for T, label in ((diff_gamma, "联络闭式"), (diff_R, "R_uiuj = −½∂²_ijH"), (diff_rho, "ρ_uu = −½ΣH_ii")):
            parts.append(_result("closed_form", ctx.sweep(tensor_probe(T)), tol, label))
        if inst.is_gradient:
            shape = _potential_shape_errors(inst)
            if shape:
                parts.append(CheckResult(name="closed_form", status="fail", errors=shape,
                                         detail="f = f₀(u) + Σκ_i x_i"))
    c = inst.expects("constant_curvature")
    if c is not None:
        expected_R = kulkarni_nomizu(g.as_tensor(), g.as_tensor()).scale(sp.sympify(c) / 2)
        parts.append(_result("closed_form", ctx.sweep(tensor_probe(curvature.riemann(g) - expected_R)), tol,
                             f"R = (c/2) g⊙g，c = {c}"))
    tau = inst.expects("scalar_curvature")
    if tau is not None:
        diff_tau = curvature.scalar_curvature(g) - inst.chart.scalar(tau)
        parts.append(_result("closed_form", ctx.sweep(scalar_probe(diff_tau)), tol,
                             f"τ = {inst.chart.scalar(tau)}"))
    if inst.expects("ricci_flat"):
        parts.append(_result("closed_form", ctx.sweep(tensor_probe(curvature.ricci(g))), tol, "ρ = 0"))
    return _combine("closed_form", parts)


def check_radial(ctx: VerifyContext) -> CheckResult:
    inst = ctx.inst
    data = inst.expects("warped")
    first, second = soliton.warped_radial_residuals(
        data["eps"], data["psi"], data["c"], data["fiber_dim"], inst.potential, inst.lam
    )
    tol = _soliton_tol(ctx, "radial")
    return _combine("radial", [
        _result("radial", ctx.sweep(scalar_probe(first)), tol, "f'' − ελ − (n+1)ψ''/ψ"),
        _result("radial", ctx.sweep(scalar_probe(second)), tol, "εψψ'f' − λψ² + nc − ε(ψψ'' + nψ'²)"),
    ])


def check_completeness(ctx: VerifyContext) -> CheckResult:
    data = ctx.inst.expects("completeness")
    result = completeness.completeness_classify(data["omega"], data["interval"])
    status = "pass" if result.verdict.value == data["verdict"] else "fail"
    lo, hi = result.interval
    return CheckResult(
        name="completeness",
        status=status,
        detail=(
            f"区间 ({lo:g}, {hi:g})：期望 {data['verdict']}，判定 {result.verdict.value}"
            f"（左侧 {result.left.kind.value}，右侧 {result.right.kind.value}）"
        ),
    )


@dataclass(frozen=True)
class CheckSpec:
    name: str
    applies: Callable[[MetricInstance], Optional[str]]
    run: Callable[[VerifyContext], CheckResult]


def _weyl_applies(inst) -> Optional[str]:
    dim = inst.metric.dimension
    if dim < 3:
        return "维数 < 3"
    if dim == 3:
        return None
    return None if inst.expects("lcf") is not None else "族没有声明 lcf"


def _codazzi_applies(inst) -> Optional[str]:
    claim = inst.expects("lcf")
    if claim is None:
        return "族没有声明 lcf"
    if inst.metric.dimension < 3:
        return "维数 < 3"
    if not claim and inst.metric.dimension > 3:
        return "四维以上非局部共形平坦由 weyl 检查判定"
    return None


def _lcf_gradient(inst) -> Optional[str]:
    reason = _need_gradient(inst)
    if reason:
        return reason
    return None if inst.expects("lcf") else "需要局部共形平坦的实例"


CHECKS: Dict[str, CheckSpec] = {spec.name: spec for spec in (
    CheckSpec("metric", _always, check_metric),
    CheckSpec("soliton", _need_soliton, check_soliton),
    CheckSpec("ricci_soliton", _need_soliton, check_ricci_soliton),
    CheckSpec("trace", _need_gradient, check_trace),
    CheckSpec("lemma", _need_gradient, check_lemma),
    CheckSpec("bianchi", _always, check_bianchi),
    CheckSpec("geodesic", _need_gradient, check_geodesic),
    CheckSpec("curv_identity", _all(_lcf_gradient, _need_dimension(3)), check_curv_identity),
    CheckSpec("codazzi", _codazzi_applies, check_codazzi),
    CheckSpec("weyl", _weyl_applies, check_weyl),
    CheckSpec("decomposition", _need_dimension(3), check_decomposition),
    CheckSpec("eigenvector", _need_gradient, check_eigenvector),
    CheckSpec("causal", _all(_need_gradient, _need_expectation("causal")), check_causal),
    CheckSpec("isotropy", _all(_need_gradient, _need_expectation("isotropic"),
                               lambda inst: None if inst.expects("isotropic") else "族声明非各向同性"),
              check_isotropy),
    CheckSpec("wave_structure", _need_expectation("null_vector"), check_wave_structure),
    CheckSpec("recurrence", lambda inst: None if (
        inst.expects("curvature_recurrence") or inst.expects("ricci_recurrence")
    ) else "族没有声明递归性", check_recurrence),
    CheckSpec("two_symmetric", _need_expectation("two_symmetric"), check_two_symmetric),
    CheckSpec("conformally_symmetric", _need_expectation("conformally_symmetric"), check_conformally_symmetric),
    CheckSpec("closed_form", lambda inst: None if any(
        inst.expects(k) is not None for k in ("pp_wave", "constant_curvature", "scalar_curvature", "ricci_flat")
    ) else "族没有可比较的闭式", check_closed_form),
    CheckSpec("radial", _all(_need_gradient, _need_expectation("warped")), check_radial),
    CheckSpec("completeness", _need_expectation("completeness"), check_completeness),
)}


# ---- 运行 ----

def run_check(name: str, ctx: VerifyContext) -> CheckResult:
    """运行单项检查；检查内部抛出的异常记为 error 状态"""
    spec = CHECKS[name]
    reason = spec.applies(ctx.inst)
    if reason:
        return CheckResult(name=name, status="skipped", detail=reason)
    try:
        result = spec.run(ctx)
    except SolitonVerifyError as e:
        logger.error(f"检查 {name} 出错: {e.detail}")
        return CheckResult(name=name, status="error", errors=[e.detail], detail=e.msg)
    except Exception as e:
        logger.error(f"检查 {name} 异常: {e}", exc_info=True)
        return CheckResult(name=name, status="error", errors=[f"{type(e).__name__}: {e}"], detail="检查内部异常")
    logger.info(f"检查 {name}: {result.status}" + (f"，残差 {result.residual:.3e}" if result.residual is not None else ""))
    return result


def select_checks(inst: MetricInstance, names: Optional[List[str]]) -> List[str]:
    """显式给出的检查全部保留（不适用的记为 skipped）；缺省时只取适用的检查"""
    if names is not None:
        return [name for name in CHECK_NAMES if name in names]
    return [name for name in CHECK_NAMES if CHECKS[name].applies(inst) is None]


def verify_instance(
    inst: MetricInstance,
    points: int = settings.DEFAULT_POINTS,
    seed: int = settings.DEFAULT_SEED,
    checks: Optional[List[str]] = None,
    tolerances: Optional[Dict[str, float]] = None,
) -> VerificationReport:
    """
    在采样点上对实例运行检查并生成报告

    参数：
    - inst: 度量 / 孤立子实例
    - points: 采样点数
    - seed: 随机种子（决定全部采样点）
    - checks: 检查名列表，缺省为全部适用检查
    - tolerances: 按检查名覆盖容差
    """
    sampled = sample_points(inst.box, points, seed)
    ctx = VerifyContext(inst, sampled, seed, dict(tolerances or {}))
    names = select_checks(inst, checks)
    logger.info(f"验证 {inst.instance_id}: {len(names)} 项检查，{points} 个采样点，seed={seed}")
    results = [run_check(name, ctx) for name in names]
    passed = all(r.status in ("pass", "skipped") for r in results)
    return VerificationReport(
        generated_at=datetime.now(timezone.utc).isoformat(),
        family=inst.family,
        instance_id=inst.instance_id,
        params={k: format_param(v) for k, v in sorted(inst.params.items())},
        lam=format_expression(inst.lam) if inst.is_soliton else None,
        classification=inst.classification if inst.is_soliton else None,
        ode_fed=inst.ode_fed,
        points=points,
        seed=seed,
        box=[list(pair) for pair in inst.box],
        checks=results,
        passed=passed,
    )


def build_from_config(config: RunConfig) -> MetricInstance:
    """
    按运行配置构造实例（族 id 或度量描述文件），并按需覆盖 λ

    异常：
    - ConfigError: 描述文件无法读取，或对非孤立子实例覆盖 λ
    """
    if config.metric_path is not None:
        try:
            with open(config.metric_path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"无法读取度量描述文件 {config.metric_path}: {e}")
        try:
            inst = MetricDescriptor.model_validate_json(text).to_instance()
        except ValueError as e:
            raise ConfigError(f"度量描述文件 {config.metric_path} 无效: {e}")
    else:
        inst = registry.build_instance(config.family, config.params)
    if config.lam is not None:
        if not inst.is_soliton:
            raise ConfigError(f"{inst.instance_id} 不是孤立子实例，不能覆盖 λ")
        inst = inst.with_lambda(parse_expression(config.lam, []))
    return inst


def run_verification(config: RunConfig) -> VerificationReport:
    inst = build_from_config(config)
    return verify_instance(inst, config.points, config.seed, config.checks, config.tolerances)
