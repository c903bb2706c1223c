"""
标量场（jet 引擎）测试

覆盖：
- 表达式语法：解析、打印再解析、非法标识符 / 函数 / 指数
- 精确求导与数值求值、定义域外求值抛出 DomainError
- 表格函数节点：二阶导数回到登记的右端项

使用方法:
    pytest scripts/test/jet/test_jet.py
    python scripts/test/jet/test_jet.py
"""

import math
import sys
from pathlib import Path

import pytest
import sympy as sp
from hypothesis import given, settings as hypothesis_settings, strategies as st

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.errors import DomainError, ParameterError
from app.models.scalar_field import ScalarField, apply, tabulated
from app.utils.expression import exact_number, format_expression, parse_expression

XY = ("x", "y")


def test_parse_and_differentiate():
    log_test_start("解析与求导")
    f = ScalarField.parse("x^2*exp(y)", XY)
    fx = f.partial("x")
    assert fx.evaluate((1.0, 0.0)) == pytest.approx(2.0), "∂x(x²eʸ) 在 (1,0) 应为 2"
    fxy = f.partial("x").partial("y")
    assert fxy.evaluate((0.5, 1.0)) == pytest.approx(math.e), "混合偏导在 (0.5,1) 应为 e"
    assert f.partial("y", order=3).expr == f.expr, "对 y 求任意阶导数不变"
    log_success("解析与求导正确")


def test_decimal_becomes_exact_rational():
    log_test_start("小数转为精确有理数")
    expr = parse_expression("0.1*x", XY)
    assert expr == sp.Rational(1, 10) * sp.Symbol("x"), "0.1 应解析为 1/10"
    assert exact_number(0.25) == sp.Rational(1, 4), "浮点 0.25 应转为 1/4"
    log_success("小数精确化正确")


def test_printed_text_parses_back():
    log_test_start("打印后再解析")
    x, y = sp.symbols("x y")
    expr = x ** 3 * sp.sin(y) / (1 + x ** 2) + sp.sqrt(1 + y ** 2)
    text = format_expression(expr)
    assert "**" not in text, "打印文本应使用 ^ 表示幂"
    assert parse_expression(text, XY) == expr, f"再解析后应得到同一表达式: {text}"
    log_success("打印与解析一致")


@pytest.mark.parametrize("text", ["z + x", "gamma(x)", "x^(1/3)", "x +* y"])
def test_rejects_outside_grammar(text):
    log_test_start(f"拒绝非法表达式 {text}")
    with pytest.raises(ParameterError):
        parse_expression(text, XY)


@pytest.mark.parametrize("text,point", [
    ("log(x)", (-1.0, 0.0)),
    ("sqrt(x)", (-2.0, 0.0)),
    ("1/x", (0.0, 1.0)),
])
def test_domain_errors(text, point):
    log_test_start(f"定义域外求值 {text}")
    with pytest.raises(DomainError):
        ScalarField.parse(text, XY).evaluate(point)


def test_arithmetic_and_apply():
    log_test_start("标量场代数运算")
    x = ScalarField.coordinate("x", XY)
    y = ScalarField.coordinate("y", XY)
    f = apply("cosh", x * y) - 1
    assert f.evaluate((0.0, 3.0)) == pytest.approx(0.0), "cosh(0) − 1 = 0"
    assert (2 / (x + 1)).evaluate((1.0, 0.0)) == pytest.approx(1.0), "2/(x+1) 在 x=1 处为 1"
    with pytest.raises(ValueError):
        ScalarField.coordinate("z", XY)
    log_success("代数运算正确")


def test_tabulated_node_second_derivative():
    log_test_start("表格函数节点的导数封闭性")
    u = sp.Symbol("u")
    node, bind_second = tabulated("F", "u", math.sin, math.cos)
    bind_second(-node)
    field = ScalarField(node, ("u", "x"))
    assert field.partial("u", 2).expr == -node, "F'' 应等于登记的 −F"
    assert field.partial("u").evaluate((0.5, 0.0)) == pytest.approx(math.cos(0.5)), "F' 应取插值导数"
    assert field.partial("u", 3).evaluate((0.5, 0.0)) == pytest.approx(-math.cos(0.5)), "F''' = −F'"
    assert field.partial("x").is_zero, "表格函数只依赖 u"
    assert node.free_symbols == {u}
    log_success("表格函数节点求导封闭")


@hypothesis_settings(max_examples=30, deadline=None)
@given(
    a=st.integers(-3, 3),
    b=st.integers(-3, 3),
    c=st.integers(-3, 3),
    x0=st.floats(-1.5, 1.5),
    y0=st.floats(-1.5, 1.5),
)
def test_partial_matches_central_difference(a, b, c, x0, y0):
    f = ScalarField.parse(f"({a})*x^3 + ({b})*x*sin(y) + ({c})*exp(x*y)", XY)
    h = 1e-5
    numeric = (f.evaluate((x0 + h, y0)) - f.evaluate((x0 - h, y0))) / (2 * h)
    exact = f.partial("x").evaluate((x0, y0))
    assert exact == pytest.approx(numeric, rel=1e-5, abs=1e-5)


if __name__ == "__main__":
    run_as_script(__file__)
