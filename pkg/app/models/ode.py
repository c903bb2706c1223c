from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional
import numpy as np
from scipy.interpolate import CubicHermiteSpline
from app.models.scalar_field import ScalarField


@dataclass(frozen=True)
class ODESolution:
    """
    ODE 数值解（或精确多项式解）

    字段：
    - grid: 自变量网格（严格递增）
    - values / derivatives: 网格上的函数值与一阶导数
    - error_estimate: Richardson 误差估计（精确路径为 0）
    - closed_form: 右端项为多项式时的精确闭式解
    """
    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    error_estimate: float
    closed_form: Optional[ScalarField] = None
    label: str = field(default="f0")

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.grid, self.values, self.derivatives, extrapolate=False)

    @property
    def interval(self) -> tuple:
        return float(self.grid[0]), float(self.grid[-1])

    def value(self, u: float) -> float:
        return float(self._spline(u))

    def slope(self, u: float) -> float:
        return float(self._spline(u, 1))

    def __call__(self, u: float) -> float:
        return self.value(u)
