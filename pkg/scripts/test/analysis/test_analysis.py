"""
ODE 求解测试：f₀'' = rhs(u) 的精确 / 数值路径，以及非梯度孤立子的 (p, q_i)

使用方法:
    pytest scripts/test/analysis/test_analysis.py
    python scripts/test/analysis/test_analysis.py
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.errors import XDependentRHS
from app.models.scalar_field import ScalarField
from app.services import analysis_service as analysis

COORDS = ("u", "v", "x1")


def field(text):
    return ScalarField.parse(text, COORDS)


def test_polynomial_rhs_is_exact():
    log_test_start("多项式右端项的精确解")
    solution = analysis.solve_f0(field("6*u"), u0=0, f0=1, df0=2)
    assert solution.closed_form is not None
    u = sp.Symbol("u")
    assert sp.expand(solution.closed_form.expr - (u ** 3 + 2 * u + 1)) == 0, "f₀ = u³ + 2u + 1"
    assert solution.error_estimate == 0.0
    assert solution(1.5) == pytest.approx(1.5 ** 3 + 4.0, abs=1e-12)
    log_success("精确路径正确")


def test_cancelling_transverse_terms_are_accepted():
    expr = analysis.u_only_expression(field("(x1 + u)^2 - x1^2 - 2*u*x1"))
    assert expr == sp.Symbol("u") ** 2


def test_transverse_dependence_is_rejected():
    log_test_start("右端项依赖横向坐标")
    with pytest.raises(XDependentRHS):
        analysis.solve_f0(field("u*x1"))


def test_numeric_path_matches_closed_form():
    log_test_start("数值路径：f₀'' = eᵘ")
    solution = analysis.solve_f0(field("exp(u)"), u0=0, f0=1, df0=1, interval=(-2, 2))
    assert solution.closed_form is None
    assert solution.error_estimate < 1e-9, f"Richardson 误差估计 {solution.error_estimate:.3e}"
    for u in np.linspace(-2, 2, 17):
        assert solution.value(u) == pytest.approx(math.exp(u), abs=1e-8)
        assert solution.slope(u) == pytest.approx(math.exp(u), abs=1e-8)
    lo, hi = solution.interval
    assert lo <= -2 and hi >= 2, "网格覆盖采样区间"
    log_success("数值解与 eᵘ 一致")


def test_numeric_solution_as_symbolic_node():
    log_test_start("数值解接入符号引擎")
    rhs = field("cos(u)")
    solution = analysis.solve_f0(rhs, interval=(-1, 1))
    f0 = analysis.as_field(solution, COORDS, second=analysis.u_only_expression(rhs))
    assert f0.partial("u", 2).expr == sp.cos(sp.Symbol("u")), "二阶导回到右端项"
    assert f0.evaluate((0.7, 0.0, 0.0)) == pytest.approx(1 - math.cos(0.7), abs=1e-8)


def test_grid_contains_start_point():
    grid = analysis._grid(0.3, -1.0, 2.0, 0.1)
    assert np.any(np.isclose(grid, 0.3)), "网格包含 u₀"
    assert np.all(np.diff(grid) > 0), "网格严格递增"


def test_functcond_closed_form():
    log_test_start("非梯度孤立子系数：精确路径")
    a, c = field("0"), field("u")
    b = [field("1"), field("0")]
    p, q = analysis.solve_functcond(a, b, c, lam=2)
    u = sp.Symbol("u")
    # q₁'' = −(λ/2)b₁ = −1，q₂ = 0
    assert sp.expand(q[0].closed_form.expr + u ** 2 / 2) == 0
    assert q[1].closed_form.expr == 0
    # p' = λc − ½b₁q₁ + n·a = 2u + u²/4
    assert sp.expand(p.closed_form.expr - (u ** 2 + u ** 3 / 12)) == 0


def test_functcond_numeric():
    log_test_start("非梯度孤立子系数：数值路径")
    a, c = field("1"), field("0")
    b = [field("1")]
    lam = 2
    p, q = analysis.solve_functcond(a, b, c, lam, q0=0, dq0=0, interval=(-1, 1))
    # q'' = q − 1 且 q(0) = q'(0) = 0 ⇒ q = 1 − cosh(u)
    for u in np.linspace(-1, 1, 9):
        assert q[0].value(u) == pytest.approx(1 - math.cosh(u), abs=1e-8)
    # p' = −½q + 1 = ½(1 + cosh u) ⇒ p = ½(u + sinh u)
    for u in np.linspace(-1, 1, 9):
        assert p.value(u) == pytest.approx(0.5 * (u + math.sinh(u)), abs=1e-8)


if __name__ == "__main__":
    run_as_script(__file__)
