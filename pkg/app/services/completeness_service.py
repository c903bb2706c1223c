"""
二维翘曲度量 −dt² + ω(t)²ds² 的测地完备性判定

完备当且仅当 ∫ |ω|/√(1+ω²) dt 在区间两端都发散。数值积分不能证明发散，
所以判定规则是启发式的：
- 无穷端点：积分范围逐次加倍，部分和超过阈值且最近若干次增量持续不衰减 → 发散；
  某次增量小于尾部容差 → 收敛；加倍次数用尽 → 无法判定
- 有限端点：被积函数有界（≤ 1），积到距端点 δ 处，尾部上界 δ < 尾部容差 → 收敛
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional
import numpy as np
import sympy as sp
from scipy import integrate
from app.config import settings
from app.errors import ParameterError
from app.models.scalar_field import ScalarField

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    INCONCLUSIVE = "inconclusive"


class SideKind(str, Enum):
    DIVERGENT = "divergent"
    CONVERGENT = "convergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SideResult:
    kind: SideKind
    partial_integral: float
    doublings: int = 0


@dataclass(frozen=True)
class CompletenessResult:
    verdict: Verdict
    left: SideResult
    right: SideResult
    interval: tuple = field(default=(-math.inf, math.inf))
    gamma: float = 0.0


def _integrand(omega: ScalarField, variable) -> Callable[[float], float]:
    symbol = sp.Symbol(variable) if isinstance(variable, str) else variable
    others = omega.expr.free_symbols - {symbol}
    if others:
        raise ParameterError(f"ω 只能依赖 {symbol}，实际还依赖 {sorted(map(str, others))}")
    w = sp.lambdify([symbol], omega.expr, modules="math")

    def density(t: float) -> float:
        try:
            value = float(w(t))
        except (ValueError, ZeroDivisionError, OverflowError) as e:
            raise ParameterError(f"ω 在 t = {t:.6g} 处无法求值: {e}")
        if math.isinf(value):
            return 1.0
        return abs(value) / math.hypot(1.0, value)

    density.omega = w
    return density


def _check_samples(density, lo: float, hi: float, gamma: float) -> None:
    left = lo if math.isfinite(lo) else gamma - 50.0
    right = hi if math.isfinite(hi) else gamma + 50.0
    ts = np.linspace(left, right, 203)[1:-1]
    values = []
    for t in ts:
        try:
            values.append(float(density.omega(float(t))))
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
    values = np.array(values)
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ParameterError("ω 在区间内的采样值不是有限实数")
    if np.all(values == 0):
        raise ParameterError("ω 在所有采样点上为 0")


def _quad(density, a: float, b: float) -> float:
    value, _ = integrate.quad(density, a, b, epsabs=settings.QUAD_TOL, limit=200)
    return float(value)


def _finite_side(density, gamma: float, endpoint: float) -> SideResult:
    """被积函数有界（≤ 1），积到距端点 δ 处，剩余尾部不超过 δ"""
    delta = settings.TAIL_TOL / 2
    stop = endpoint - delta if endpoint > gamma else endpoint + delta
    value = abs(_quad(density, min(gamma, stop), max(gamma, stop)))
    return SideResult(SideKind.CONVERGENT, value)


def _infinite_side(density, gamma: float, direction: int) -> SideResult:
    total = 0.0
    increments = []
    reach = 0.0
    length = 1.0
    for doubling in range(1, settings.MAX_DOUBLINGS + 1):
        a, b = gamma + direction * reach, gamma + direction * length
        piece = abs(_quad(density, min(a, b), max(a, b)))
        total += piece
        increments.append(piece)
        if piece < settings.TAIL_TOL:
            return SideResult(SideKind.CONVERGENT, total, doubling)
        recent = increments[-(settings.DIVERGENCE_DOUBLINGS + 1):]
        sustained = len(recent) == settings.DIVERGENCE_DOUBLINGS + 1 and all(
            later >= 0.5 * earlier for earlier, later in zip(recent, recent[1:])
        )
        if total > settings.DIVERGENCE_THRESHOLD and sustained:
            return SideResult(SideKind.DIVERGENT, total, doubling)
        reach, length = length, 2 * length
    return SideResult(SideKind.INCONCLUSIVE, total, settings.MAX_DOUBLINGS)


def completeness_classify(
    omega: ScalarField,
    interval: tuple = (-math.inf, math.inf),
    gamma: Optional[float] = None,
    variable: str = "t",
) -> CompletenessResult:
    """
    判定 −dt² + ω(t)²ds² 的测地完备性

    参数：
    - omega: 翘曲函数 ω(t)
    - interval: 定义区间 (α, β)，端点可以是 ±inf
    - gamma: 区间内的基点，缺省取区间中点（两端都无穷时取 0）

    返回：
    - CompletenessResult：两侧都发散为 complete，任一侧收敛为 incomplete，否则 inconclusive

    异常：
    - ParameterError: ω 的采样值非有限、处处为 0，或 gamma 不在区间内部
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ParameterError(f"区间 ({lo}, {hi}) 为空")
    if gamma is None:
        if math.isfinite(lo) and math.isfinite(hi):
            gamma = (lo + hi) / 2
        elif math.isfinite(lo):
            gamma = lo + 1.0
        elif math.isfinite(hi):
            gamma = hi - 1.0
        else:
            gamma = 0.0
    gamma = float(gamma)
    if not lo < gamma < hi:
        raise ParameterError(f"基点 {gamma} 不在区间 ({lo}, {hi}) 内部")

    density = _integrand(omega, variable)
    _check_samples(density, lo, hi, gamma)

    left = _infinite_side(density, gamma, -1) if math.isinf(lo) else _finite_side(density, gamma, lo)
    right = _infinite_side(density, gamma, 1) if math.isinf(hi) else _finite_side(density, gamma, hi)

    if left.kind is SideKind.DIVERGENT and right.kind is SideKind.DIVERGENT:
        verdict = Verdict.COMPLETE
    elif SideKind.CONVERGENT in (left.kind, right.kind):
        verdict = Verdict.INCOMPLETE
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.info(
        f"完备性判定: ω = {omega}, 区间 = ({lo}, {hi}), 左侧 {left.kind.value}, "
        f"右侧 {right.kind.value} → {verdict.value}"
    )
    return CompletenessResult(verdict, left, right, (lo, hi), gamma)
