"""模型统一导出入口，供服务层与命令层调用"""
from .scalar_field import ScalarField
from .geometry import Chart, MetricField, Signature, TensorField
from .ode import ODESolution
from .soliton import MetricInstance, SolitonInstance

# 暴露所有不可变领域值类型
__all__ = [
    "ScalarField",
    "Chart",
    "MetricField",
    "Signature",
    "TensorField",
    "ODESolution",
    "MetricInstance",
    "SolitonInstance",
]
