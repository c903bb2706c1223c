"""
结构检查测试：因果类型、Ricci 特征向量、波结构、递归性、各向同性

使用方法:
    pytest scripts/test/structure/test_structure.py
    python scripts/test/structure/test_structure.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.config import settings
from app.errors import NotNull, ZeroTensor
from app.models.geometry import TensorField
from app.services import catalog_service as catalog
from app.services import curvature_service as curvature
from app.services import structure_service as structure
from app.utils.sampling import sample_points


def test_gaussian_causal_character():
    log_test_start("Gauss 孤立子梯度的因果类型")
    inst = catalog.minkowski_gaussian(dim=3, lam=1)
    expected = {
        (1.0, 0.0, 0.0): "timelike",
        (1.0, 1.0, 0.0): "null",
        (0.0, 1.0, 0.0): "spacelike",
        (0.0, 0.0, 0.0): "zero",
    }
    for point, kind in expected.items():
        assert structure.causal_character(inst, point) == kind, f"{point} 处 ∇f 应为 {kind}"
    log_success("因果类型与 x1² 和 Σx_i² 的比较一致")


def test_gradient_is_ricci_eigenvector():
    log_test_start("∇f 是 Ricci 算子的特征向量")
    for inst in (catalog.minkowski_gaussian(dim=3, lam=2), catalog.two_symmetric(n=2)):
        points = list(sample_points(inst.box, 15, seed=1))
        report = structure.ricci_eigenvector_check(inst, points)
        assert report.evaluated > 0
        assert_small(max(report.residual, report.null_residual), settings.TOL_SYMBOLIC, inst.instance_id)


def test_eigenvector_skips_zero_gradient():
    inst = catalog.minkowski_gaussian(dim=3, lam=1)
    report = structure.ricci_eigenvector_check(inst, [np.zeros(3), np.array([0.5, 0.2, 0.1])])
    assert report.evaluated == 1 and len(report.skipped) == 1, "∇f = 0 的点应跳过"


def test_pp_wave_structure():
    log_test_start("pp-wave 的波结构")
    inst = catalog.pp_wave(H="x1^3*u + x2^2", n=2)
    points = list(sample_points(inst.box, 15, seed=2))
    report = structure.wave_structure_check(inst.metric, inst.expects("null_vector"), points)
    assert report.is_pr_wave, "pp-wave 是 pr-wave"
    assert_small(report.parallel, settings.TOL_SYMBOLIC, "∇∂v")
    assert report.evaluated == len(points)


def test_space_form_is_not_pr_wave():
    log_test_start("常曲率空间不满足 pr-wave 条件")
    inst = catalog.space_form(dim=3, c=1)
    points = list(sample_points(inst.box, 10, seed=2))
    V = inst.expects("null_vector")
    # ∂x1 + ∂x2 在共形平坦度量下处处类光
    report = structure.wave_structure_check(inst.metric, V, points)
    assert report.pr_wave >= settings.NONVANISHING_MIN, f"max|R(𝒟^⊥,𝒟^⊥)| = {report.pr_wave:.3e}"


def test_wave_structure_requires_null_vector():
    inst = catalog.pp_wave(H="1 + x1^2", n=2)
    d_u = TensorField.vector(inst.chart, [1, 0, 0, 0])
    with pytest.raises(NotNull):
        structure.wave_structure_check(inst.metric, d_u, [np.array([0.1, 0.2, 0.3, 0.4])])


def test_isotropic_gradient_is_recurrent():
    log_test_start("各向同性孤立子的 ∇f 递归")
    inst = catalog.cflat_pp_wave(n=2, a="1")
    points = [p for p in sample_points(inst.box, 20, seed=8) if abs(p[0]) > 0.05]
    grad_f = curvature.gradient(inst.potential, inst.metric)
    report = structure.wave_structure_check(inst.metric, grad_f, points)
    assert_small(report.recurrence, settings.RECURRENCE_REL_TOL, "∇∇f − σ⊗∇f")
    assert_small(report.sigma_pattern, settings.RECURRENCE_REL_TOL, "σ(U) + ρ(U,U)")
    assert_small(report.sigma_transverse, settings.RECURRENCE_REL_TOL, "σ(V), σ(E_i)")
    iso = structure.isotropy_check(inst, points)
    assert_small(iso.residual, settings.TOL_SYMBOLIC, "各向同性结构")


def test_recurrence_kinds():
    log_test_start("递归性判定")
    space = catalog.space_form(dim=3, c=1)
    points = list(sample_points(space.box, 10, seed=3))
    assert structure.recurrence_check(curvature.riemann(space.metric), space.metric, points).kind == "parallel"

    wave = catalog.recurrent_type1(n=2, kappa1=1, h0="exp(u)")
    points = list(sample_points(wave.box, 10, seed=3))
    result = structure.recurrence_check(curvature.riemann(wave.metric), wave.metric, points)
    assert result.kind == "recurrent", f"第一类递归解应判为 recurrent，实际 {result.kind}"
    expected = wave.expects("curvature_sigma")
    for sigma, point in zip(result.sigmas, points):
        target = np.array([s.evaluate(point) for s in expected])
        assert np.allclose(sigma, target, atol=1e-6), f"σ = {sigma}，期望 {target}"

    plain = catalog.pp_wave(H="x1^3 + x2^4", n=2)
    points = list(sample_points(plain.box, 10, seed=3))
    assert structure.recurrence_check(curvature.riemann(plain.metric), plain.metric, points).kind == "neither"


def test_cflat_ricci_recurrence():
    log_test_start("局部共形平坦 pp-wave 的 Ricci 递归")
    inst = catalog.cflat_pp_wave(n=2, a="exp(u)")
    assert inst.expects("ricci_recurrence") == "recurrent", "a 无零点时应声明 Ricci 递归"
    points = list(sample_points(inst.box, 10, seed=5))
    result = structure.recurrence_check(curvature.ricci(inst.metric), inst.metric, points)
    assert result.kind == "recurrent", f"a = e^u 时应判为 recurrent，实际 {result.kind}"
    target = np.array([1.0, 0.0, 0.0, 0.0])
    for sigma, point in zip(result.sigmas, points):
        assert np.allclose(sigma, target, atol=1e-6), f"σ = {sigma}，期望 (ln a)'du = {target}"
        declared = np.array([s.evaluate(point) for s in inst.expects("ricci_sigma")])
        assert np.allclose(declared, target, atol=1e-12), f"声明的 σ = {declared}"

    constant = catalog.cflat_pp_wave(n=2, a="3")
    assert constant.expects("ricci_recurrence") == "parallel"
    assert constant.expects("curvature_recurrence") == "parallel"
    assert catalog.cflat_pp_wave(n=2, a="u").expects("ricci_recurrence") is None, "a 有零点时不声明递归"
    log_success("σ = du")


def test_conformally_symmetric_weyl():
    log_test_start("共形对称 pp-wave：∇W = 0 且 W ≠ 0")
    inst = catalog.conformally_symmetric()
    points = list(sample_points(inst.box, 10, seed=6))
    W = curvature.weyl(inst.metric)
    weyl_size = max_over_points(W, points)
    assert weyl_size >= settings.NONVANISHING_MIN, f"max|W| = {weyl_size:.3e}"
    assert_small(max_over_points(curvature.covariant_derivative(W, inst.metric), points), 1e-8, "max|∇W|")
    log_success(f"max|W| = {weyl_size:.3e}")


def test_recurrence_of_zero_tensor():
    inst = catalog.minkowski_gaussian(dim=3)
    points = list(sample_points(inst.box, 5, seed=0))
    with pytest.raises(ZeroTensor):
        structure.recurrence_check(curvature.riemann(inst.metric), inst.metric, points)


if __name__ == "__main__":
    run_as_script(__file__)
