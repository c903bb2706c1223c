"""
曲率引擎测试

覆盖：
- 极坐标平面的 Christoffel 符号与平坦性
- 常曲率空间形式：R = (c/2)g⊙g、ρ = c(N−1)g、τ = cN(N−1)
- pp-wave 闭式：联络、R_uiuj = −½∂²H、ρ_uu = −½ΣH_ii、τ = 0
- 度量相容（∇g = 0）、二阶 Bianchi、三维 Weyl 为零、Schouten 的维数限制

使用方法:
    pytest scripts/test/curvature/test_curvature.py
    python scripts/test/curvature/test_curvature.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings as hypothesis_settings, strategies as st

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.errors import DimensionError
from app.models.geometry import Chart, MetricField, Signature, TensorField
from app.services import catalog_service as catalog
from app.services import curvature_service as curvature
from app.services import soliton_service as soliton
from app.services import structure_service as structure
from app.services.geometry_service import kulkarni_nomizu
from app.utils.sampling import sample_points


def pp_metric(H_text, n):
    names = ("u", "v") + tuple(f"x{i + 1}" for i in range(n))
    chart = Chart(names, ((-2, 2),) * (n + 2))
    H = chart.scalar(H_text).expr
    matrix = sp.zeros(n + 2, n + 2)
    matrix[0, 0] = H
    matrix[0, 1] = matrix[1, 0] = 1
    for i in range(n):
        matrix[i + 2, i + 2] = 1
    return MetricField(chart, matrix)


def test_polar_plane_christoffel():
    log_test_start("极坐标平面")
    chart = Chart(("r", "th"), ((0.5, 2), (0, 3)))
    r, _ = chart.symbols
    g = MetricField(chart, sp.diag(1, r ** 2), Signature.RIEMANNIAN)
    gamma = curvature.christoffel(g).components
    assert sp.simplify(gamma[0, 1, 1] + r) == 0, "Γ^r_θθ = −r"
    assert sp.simplify(gamma[1, 0, 1] - 1 / r) == 0, "Γ^θ_rθ = 1/r"
    assert gamma[1, 1, 0] == gamma[1, 0, 1], "Christoffel 关于下指标对称"
    assert curvature.riemann(g).is_structurally_zero or max_over_points(
        curvature.riemann(g), [(1.0, 0.5), (1.7, 2.0)]
    ) < 1e-12, "平面曲率为零"
    log_success("极坐标平面联络正确")


@pytest.mark.parametrize("dim,c", [(3, 1), (3, -2), (4, 1)])
def test_space_form_curvature(dim, c):
    log_test_start(f"常曲率空间形式 dim={dim}, c={c}")
    inst = catalog.space_form(dim=dim, c=c)
    g = inst.metric
    points = sample_points(inst.box, 10, seed=3)
    expected = kulkarni_nomizu(g.as_tensor(), g.as_tensor()).scale(sp.Rational(c, 2))
    assert_small(max_over_points(curvature.riemann(g) - expected, points), 1e-10, "R − (c/2)g⊙g")
    einstein = curvature.ricci(g) - g.as_tensor().scale(c * (dim - 1))
    assert_small(max_over_points(einstein, points), 1e-10, "ρ − c(N−1)g")
    tau = curvature.scalar_curvature(g)
    for point in points:
        assert tau.evaluate(point) == pytest.approx(c * dim * (dim - 1), abs=1e-9)
    log_success("空间形式曲率正确")


@pytest.mark.parametrize("H,n", [
    ("x1^3*u - x1*x2^2", 2),
    ("exp(u)*x1^2 + sin(u)*x1", 1),
    ("x1^2*x2 + u^2*x3^2 - x1*x3", 3),
])
def test_pp_wave_closed_forms(H, n):
    log_test_start(f"pp-wave 闭式 H={H}")
    g = pp_metric(H, n)
    points = sample_points(g.chart.box, 25, seed=11)
    report = structure.pp_wave_closed_forms(g, points)
    assert_small(report.christoffel, 1e-10, "联络")
    assert_small(report.riemann, 1e-10, "R_uiuj = −½∂²_ijH")
    assert_small(report.ricci, 1e-10, "ρ_uu = −½ΣH_ii")
    assert_small(report.scalar_curvature, 1e-10, "τ")


@hypothesis_settings(max_examples=5, deadline=None)
@given(coefficients=st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_random_polynomial_pp_wave(coefficients):
    c1, c2, c3, c4, c5 = coefficients
    H = f"({c1})*x1^4 + ({c2})*u*x1*x2 + ({c3})*x2^3 + ({c4})*u^2*x1 + ({c5})"
    g = pp_metric(H, 2)
    points = sample_points(g.chart.box, 10, seed=5)
    assert structure.pp_wave_closed_forms(g, points).residual <= 1e-10


def test_metric_compatibility_and_bianchi():
    log_test_start("度量相容与二阶 Bianchi")
    g = pp_metric("exp(u)*x1^2*x2 + x2^4", 2)
    points = sample_points(g.chart.box, 10, seed=2)
    assert_small(max_over_points(curvature.covariant_derivative(g.as_tensor(), g), points), 1e-12, "∇g")
    assert_small(max_over_points(soliton.bianchi_residual(g), points), 1e-10, "dτ − 2 div ρ")
    nabla_R = curvature.covariant_derivative(curvature.riemann(g), g)
    assert nabla_R.index_types == ("l",) * 5, "求导槽位追加在最后"
    cyclic = max(
        float(np.max(np.abs(v + np.einsum("abcde->abdec", v) + np.einsum("abcde->abecd", v))))
        for v in (nabla_R.evaluate(p) for p in points)
    )
    assert_small(cyclic, 1e-10, "第二 Bianchi 恒等式")


def test_weyl_vanishes_in_dimension_three():
    log_test_start("三维 Weyl 张量为零")
    chart = Chart(("t", "x", "y"), ((-1, 1), (-1, 1), (-1, 1)))
    t, x, _ = chart.symbols
    g = MetricField(chart, sp.diag(-1, sp.exp(2 * t), sp.exp(t) * (1 + x ** 2)))
    points = sample_points(chart.box, 10, seed=4)
    assert_small(max_over_points(curvature.weyl(g), points), 1e-9, "max|W|")
    log_success("三维 Weyl 为零")


def test_schouten_requires_dimension_three():
    log_test_start("Schouten 维数限制")
    chart = Chart(("t", "s"), ((-1, 1), (-1, 1)))
    g = MetricField(chart, sp.diag(-1, 1))
    with pytest.raises(DimensionError):
        curvature.schouten(g)
    with pytest.raises(ValueError):
        curvature.covariant_derivative(TensorField.zeros(chart, ("l",) * 6), g)
    log_success("维数限制生效")


def test_hessian_trace_and_lie_derivative():
    log_test_start("Hessian、Laplace 与 Lie 导数")
    g = pp_metric("x1^2 + u*x2", 2)
    u, v, x1, x2 = g.chart.symbols
    f = g.chart.scalar(u ** 2 * x1 + v * x2)
    points = sample_points(g.chart.box, 10, seed=6)
    hes = curvature.hessian(f, g)
    lie = curvature.lie_derivative_metric(curvature.gradient(f, g), g)
    assert_small(max_over_points(lie - hes.scale(2), points), 1e-10, "𝓛_{∇f}g − 2Hes_f")
    inv = g.inverse_components
    trace = sum(inv[a, b] * hes.components[a, b] for a in range(4) for b in range(4))
    lap = curvature.laplacian(f, g)
    for point in points:
        expected = float(sp.lambdify(g.chart.symbols, trace)(*point))
        assert lap.evaluate(point) == pytest.approx(expected, abs=1e-10)


if __name__ == "__main__":
    run_as_script(__file__)
