"""
测地完备性判定测试：∫ |ω|/√(1+ω²) dt 在两端是否发散

使用方法:
    pytest scripts/test/completeness/test_completeness.py
    python scripts/test/completeness/test_completeness.py
"""

import math
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.errors import ParameterError
from app.models.scalar_field import ScalarField
from app.services.completeness_service import SideKind, Verdict, completeness_classify

INF = math.inf


def omega(text):
    return ScalarField.parse(text, ("t", "s"))


@pytest.mark.parametrize("text", ["sqrt(2)*tanh(t/sqrt(2))", "1", "t^2 + 1"])
def test_complete_on_whole_line(text):
    log_test_start(f"整条直线上完备: ω = {text}")
    result = completeness_classify(omega(text), (-INF, INF))
    assert result.verdict is Verdict.COMPLETE, f"实际 {result.verdict.value}"
    assert result.left.kind is SideKind.DIVERGENT and result.right.kind is SideKind.DIVERGENT
    assert result.gamma == 0.0


def test_decaying_warping_is_incomplete():
    log_test_start("ω 快速衰减时不完备")
    result = completeness_classify(omega("exp(-t^2)"), (-INF, INF))
    assert result.verdict is Verdict.INCOMPLETE
    assert result.right.kind is SideKind.CONVERGENT
    assert result.right.partial_integral < 1.0


def test_finite_endpoint_is_incomplete():
    log_test_start("有限端点")
    result = completeness_classify(omega("t"), (0, INF))
    assert result.verdict is Verdict.INCOMPLETE, "区间在 ω 的零点处截断"
    assert result.left.kind is SideKind.CONVERGENT
    assert result.right.kind is SideKind.DIVERGENT
    assert result.gamma == 1.0, "左端有限时基点取 α + 1"

    half = math.pi / math.sqrt(2)
    tan_case = completeness_classify(omega("sqrt(2)*tan(t/sqrt(2))"), (-half, half))
    assert tan_case.verdict is Verdict.INCOMPLETE, "tan 情形在极点处截断"
    assert tan_case.gamma == 0.0


def test_invalid_inputs():
    log_test_start("非法输入")
    with pytest.raises(ParameterError):
        completeness_classify(omega("0"), (-INF, INF))
    with pytest.raises(ParameterError):
        completeness_classify(omega("t"), (1, 1))
    with pytest.raises(ParameterError):
        completeness_classify(omega("t"), (0, 2), gamma=3)
    with pytest.raises(ParameterError):
        completeness_classify(omega("t*s"), (-INF, INF))


if __name__ == "__main__":
    run_as_script(__file__)
