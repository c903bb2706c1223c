from typing import Optional


class SolitonVerifyError(Exception):
    def __init__(self, code: int = 400, detail: str = "验证错误", msg: Optional[str] = None):
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.msg = msg if msg is not None else detail


class DomainError(SolitonVerifyError):
    """子表达式在实数定义域外求值（log ≤ 0、除以 0、sqrt < 0），表示采样点不合适"""
    def __init__(self, detail: str):
        super().__init__(code=422, detail=detail, msg="采样点超出表达式定义域")


class DegenerateMetric(SolitonVerifyError):
    def __init__(self, detail: str = "度量退化"):
        super().__init__(code=422, detail=detail, msg="度量退化")


class DimensionError(SolitonVerifyError):
    def __init__(self, dimension: int, required: int):
        super().__init__(
            code=400,
            detail=f"维数 {dimension} 不足，至少需要 {required}",
            msg="维数不足",
        )


class ZeroGradient(SolitonVerifyError):
    def __init__(self, point):
        super().__init__(code=422, detail=f"点 {tuple(point)} 处 ∇f = 0", msg="梯度为零")


class NotNull(SolitonVerifyError):
    def __init__(self, norm: float):
        super().__init__(code=400, detail=f"向量场不是类光的: g(V,V) = {norm:.3e}", msg="向量场非类光")


class ZeroTensor(SolitonVerifyError):
    def __init__(self):
        super().__init__(code=400, detail="张量在所有采样点上为零，无法判定递归性", msg="零张量")


class ParameterError(SolitonVerifyError):
    def __init__(self, detail: str):
        super().__init__(code=400, detail=detail, msg="参数不满足族约束")


class XDependentRHS(SolitonVerifyError):
    def __init__(self, symbols):
        names = ", ".join(sorted(str(s) for s in symbols))
        super().__init__(
            code=422,
            detail=f"右端项依赖于 u 以外的坐标: {names}，方程无解",
            msg="右端项依赖横向坐标",
        )


class SolverStepFailure(SolitonVerifyError):
    def __init__(self, detail: str):
        super().__init__(code=500, detail=detail, msg="ODE 求解失败")


class ConfigError(SolitonVerifyError):
    def __init__(self, detail: str):
        super().__init__(code=2, detail=detail, msg="配置错误")


class ReportParseError(SolitonVerifyError):
    def __init__(self, path: str, detail: str):
        super().__init__(code=2, detail=f"{path}: {detail}", msg="报告文件解析失败")
