"""
孤立子恒等式测试

覆盖：
- Gauss 孤立子对任意 λ 成立；改变 λ 后残差等于 |Δλ|·g 的尺度
- 迹恒等式、两条引理恒等式、测地方程、曲率恒等式
- 曲率分解 R = τ/(2(n+2)(n+1)) g⊙g + (1/n) ρ₀⊙g + W
- 翘曲积径向方程（cigar tanh 情形）
- 非梯度孤立子：½𝓛_X g + ρ − λg

使用方法:
    pytest scripts/test/soliton/test_soliton.py
    python scripts/test/soliton/test_soliton.py
"""

import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.config import settings
from app.errors import ParameterError
from app.services import catalog_service as catalog
from app.services import soliton_service as soliton
from app.utils.sampling import sample_points

TOL = settings.TOL_SYMBOLIC


def points_for(inst, count=20, seed=0):
    return sample_points(inst.box, count, seed)


@pytest.mark.parametrize("lam", [-1, 0, 1, 2])
def test_gaussian_soliton_any_lambda(lam):
    log_test_start(f"Gauss 孤立子 λ={lam}")
    inst = catalog.minkowski_gaussian(dim=3, lam=lam)
    points = points_for(inst)
    assert_small(max_over_points(soliton.gradient_soliton_residual(inst), points), TOL, "Hes_f + ρ − λg")
    assert_small(max_over_points(soliton.trace_residual(inst), points), TOL, "Δf + τ − (n+2)λ")
    assert_small(max_over_points(soliton.geodesic_residual(inst), points), TOL, "测地方程")
    assert_small(max_over_points(soliton.ricci_soliton_residual(inst), points), TOL, "½𝓛_{∇f}g + ρ − λg")
    expected = {1: "shrinking", 0: "steady", -1: "expanding", 2: "shrinking"}[lam]
    assert inst.classification == expected, f"λ={lam} 的分类应为 {expected}"


def test_wrong_lambda_is_detected():
    log_test_start("错误的 λ")
    inst = catalog.minkowski_gaussian(dim=3, lam=1).with_lambda(3)
    residual = max_over_points(soliton.gradient_soliton_residual(inst), points_for(inst))
    assert residual == pytest.approx(2.0, abs=1e-12), "|Δλ|·max|g| = 2"
    log_success("λ 不符时残差等于 |Δλ|")


def test_lemma_identities():
    log_test_start("引理恒等式")
    for inst in (
        catalog.minkowski_gaussian(dim=4, lam=-1),
        catalog.cflat_pp_wave(n=2, a="1"),
        catalog.cigar_2d(case="tanh"),
    ):
        points = points_for(inst)
        first, second = soliton.lemma_identities(inst)
        assert_small(max_over_points(first, points), TOL, f"{inst.instance_id}: ∇τ − 2Ric(∇f)")
        values = [second.evaluate(p) for p in points]
        assert_small(max(values) - min(values), TOL, f"{inst.instance_id}: τ + ‖∇f‖² − 2λf 的极差")


def test_curv_identity_on_conformally_flat():
    log_test_start("局部共形平坦孤立子的曲率恒等式")
    inst = catalog.cflat_pp_wave(n=2, a="1+u^2", b=["u", "0"])
    points = points_for(inst)
    assert_small(max_over_points(soliton.curv_identity_residual(inst), points), TOL, "曲率恒等式")
    assert_small(max_over_points(soliton.codazzi_schouten_residual(inst.metric), points), TOL, "Codazzi")


def test_decomposition():
    log_test_start("曲率分解")
    for inst in (catalog.space_form(dim=3, c=1), catalog.two_symmetric(n=2, a=(1, 2))):
        points = points_for(inst, 10)
        assert_small(max_over_points(soliton.decomposition_residual(inst.metric), points), TOL,
                     f"{inst.instance_id}: 分解残差")
    einstein = catalog.space_form(dim=3, c=-1)
    assert max_over_points(soliton.traceless_ricci(einstein.metric), points_for(einstein, 10)) < TOL, \
        "空间形式是 Einstein 的"


@pytest.mark.parametrize("case", ["tanh", "tan", "flat"])
def test_cigar_radial_equations(case):
    log_test_start(f"cigar 径向方程 {case}")
    inst = catalog.cigar_2d(case=case, a=1, b=0 if case != "flat" else 1, r=1)
    data = inst.expects("warped")
    first, second = soliton.warped_radial_residuals(
        data["eps"], data["psi"], data["c"], data["fiber_dim"], inst.potential, inst.lam
    )
    points = points_for(inst)
    assert_small(max_over_points(first, points), TOL, "f'' − ελ − (n+1)ψ''/ψ")
    assert_small(max_over_points(second, points), TOL, "第二个径向方程")
    assert_small(max_over_points(soliton.gradient_soliton_residual(inst), points), TOL, "孤立子残差")


def test_einstein_brinkmann_is_soliton():
    log_test_start("Einstein 翘曲积")
    for eps in (1, -1):
        inst = catalog.einstein_brinkmann(eps=eps, lam=1, a=1)
        points = points_for(inst, 15)
        assert_small(max_over_points(soliton.gradient_soliton_residual(inst), points), TOL,
                     f"ε={eps} 孤立子残差")
        assert inst.metric.signature.negative_count == 1


@pytest.mark.parametrize("lam", [-1, 0, 1])
def test_vector_soliton_on_conformally_flat_wave(lam):
    log_test_start(f"非梯度孤立子 λ={lam}")
    inst = catalog.cflat_soliton_vector(n=2, a="1", b=["1", "0"], c="0", lam=lam)
    assert not inst.is_gradient
    residual = max_over_points(soliton.ricci_soliton_residual(inst), points_for(inst, 30))
    tol = settings.soliton_tolerance(inst.ode_fed)
    assert_small(residual, max(tol, 1e-6), "½𝓛_X g + ρ − λg")


def test_gradient_only_helpers_reject_vector_solitons():
    inst = catalog.cflat_soliton_vector(n=1, a="1", lam=0)
    with pytest.raises((ParameterError, ValueError)):
        soliton.trace_residual(inst)


if __name__ == "__main__":
    run_as_script(__file__)
