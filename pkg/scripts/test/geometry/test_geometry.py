"""
几何层测试：坐标卡、度量场、指标升降、Kulkarni–Nomizu 积与度量不变量

使用方法:
    pytest scripts/test/geometry/test_geometry.py
    python scripts/test/geometry/test_geometry.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.errors import DegenerateMetric
from app.models.geometry import Chart, MetricField, Signature, TensorField
from app.services import curvature_service as curvature
from app.services.geometry_service import (
    kulkarni_nomizu,
    lower_index,
    metric_inverse,
    metric_invariants,
    raise_index,
)

BOX3 = ((-2, 2), (-2, 2), (-2, 2))


def minkowski(dim=3):
    chart = Chart(tuple(f"x{i + 1}" for i in range(dim)), ((-2, 2),) * dim)
    return MetricField(chart, sp.diag(-1, *([1] * (dim - 1))))


def test_chart_validation():
    log_test_start("坐标卡校验")
    with pytest.raises(ValueError):
        Chart(("x", "x"), ((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        Chart(("x", "y"), ((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        Chart(("x",), ((0, 1),))
    chart = Chart(("u", "v", "x1"), BOX3)
    assert chart.n == 1, "n = 维数 − 2"
    assert chart.interval("v") == (-2.0, 2.0)
    log_success("坐标卡校验正确")


def test_metric_must_be_symmetric():
    log_test_start("度量对称性")
    chart = Chart(("x", "y"), ((0, 1), (0, 1)))
    x, y = chart.symbols
    with pytest.raises(ValueError):
        MetricField(chart, sp.Matrix([[1, x], [y, 1]]))
    log_success("非对称度量被拒绝")


def test_metric_invariants():
    log_test_start("度量不变量")
    info = metric_invariants(minkowski(3), (0.3, -0.2, 1.0))
    assert info["det"] == pytest.approx(-1.0), "Minkowski 行列式为 −1"
    assert info["negative"] == 1 and info["signature_ok"], "洛伦兹号差应有一个负特征值"
    assert info["symmetry"] == 0.0

    chart = Chart(("x", "y"), ((0.5, 2), (0, 1)))
    x, _ = chart.symbols
    polar = MetricField(chart, sp.diag(1, x ** 2), Signature.RIEMANNIAN)
    assert metric_invariants(polar, (1.0, 0.3))["signature_ok"], "黎曼度量没有负特征值"
    wrong = MetricField(chart, sp.diag(1, x ** 2))
    assert not metric_invariants(wrong, (1.0, 0.3))["signature_ok"], "声明为洛伦兹的正定度量号差不符"
    log_success("度量不变量正确")


def test_degenerate_metric():
    log_test_start("退化度量")
    chart = Chart(("x", "y"), ((0, 1), (0, 1)))
    x, _ = chart.symbols
    with pytest.raises(DegenerateMetric):
        _ = MetricField(chart, sp.diag(0, 1)).inverse_components
    with pytest.raises(DegenerateMetric):
        metric_inverse(MetricField(chart, sp.diag(x, 1)), (0.0, 0.5))
    log_success("退化度量被识别")


def test_raise_then_lower_is_identity():
    log_test_start("指标升降互逆")
    g = minkowski(3)
    x1, x2, x3 = g.chart.symbols
    df = curvature.differential(g.chart.scalar(x1 * x2 + x3 ** 2), g)
    grad = raise_index(df, g, 0)
    assert grad.index_types == ("u",)
    assert sp.simplify(grad.components[0] + x2) == 0, "∇f 的时间分量应为 −∂₁f"
    back = lower_index(grad, g, 0)
    for a in range(3):
        assert sp.simplify(back.components[a] - df.components[a]) == 0
    with pytest.raises(ValueError):
        raise_index(grad, g, 0)
    log_success("指标升降互逆")


def test_kulkarni_nomizu_symmetries():
    log_test_start("Kulkarni–Nomizu 积")
    chart = Chart(("x", "y"), ((0, 1), (0, 1)))
    A = TensorField.from_function(chart, ("l", "l"), lambda a, b: 1 if a == b == 0 else 0)
    B = TensorField.from_function(chart, ("l", "l"), lambda a, b: 1 if a == b == 1 else 0)
    AB = kulkarni_nomizu(A, B).components
    assert AB[0, 1, 0, 1] == 1, "(A⊙B)_xyxy = A_xx B_yy"
    assert AB[1, 0, 0, 1] == -1, "前一对指标反对称"
    assert AB[0, 1, 1, 0] == -1, "后一对指标反对称"

    G = minkowski(3).as_tensor()
    GG = kulkarni_nomizu(G, G).components
    assert GG[0, 1, 0, 1] == -2, "(g⊙g)_abab = 2 g_aa g_bb"
    for idx in np.ndindex(3, 3, 3, 3):
        a, b, c, d = idx
        assert GG[idx] == GG[c, d, a, b], "成对交换对称"
        assert GG[a, b, c, d] + GG[a, c, d, b] + GG[a, d, b, c] == 0, "第一 Bianchi 恒等式"
    with pytest.raises(ValueError):
        kulkarni_nomizu(A, TensorField.zeros(chart, ("l",)))
    log_success("Kulkarni–Nomizu 积满足曲率张量对称性")


def test_tensor_evaluation_skips_structural_zeros():
    log_test_start("张量求值")
    chart = Chart(("x", "y"), ((0.1, 1), (0, 1)))
    x, y = chart.symbols
    T = TensorField.from_function(chart, ("l", "l"), lambda a, b: sp.log(x) if a == b == 0 else 0)
    value = T.evaluate((1.0, 0.5))
    assert value.shape == (2, 2)
    assert np.allclose(value, 0.0), "log(1) = 0，其余分量结构为零"
    assert T.nonzero_indices == ((0, 0),)
    log_success("张量求值正确")


if __name__ == "__main__":
    run_as_script(__file__)
