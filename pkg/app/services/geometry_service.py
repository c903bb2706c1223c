"""
几何服务：逆度量、指标升降、Kulkarni–Nomizu 积与度量不变量检查
"""
import itertools
import logging
from typing import Sequence
import numpy as np
import sympy as sp
from app.config import settings
from app.errors import DegenerateMetric
from app.models.geometry import MetricField, TensorField

logger = logging.getLogger(__name__)


def metric_inverse(g: MetricField, point: Sequence[float]) -> np.ndarray:
    """
    数值逆度量 g^{-1}(point)

    异常：
    - DegenerateMetric: |det g| ≤ DET_MIN
    """
    matrix = g.evaluate(point)
    det = float(np.linalg.det(matrix))
    if abs(det) <= settings.DET_MIN:
        raise DegenerateMetric(f"点 {tuple(point)} 处 |det g| = {abs(det):.3e} ≤ {settings.DET_MIN}")
    return np.linalg.inv(matrix)


def _contract_slot(T: TensorField, matrix, slot: int, new_type: str) -> TensorField:
    """用对称矩阵（度量或逆度量）收缩张量的第 slot 个指标，结果放回原位"""
    dim = T.chart.dimension
    out = np.empty(T.components.shape, dtype=object)
    for idx in itertools.product(range(dim), repeat=T.rank):
        terms = []
        for k in range(dim):
            m = matrix[idx[slot], k]
            if m == 0:
                continue
            source = idx[:slot] + (k,) + idx[slot + 1:]
            value = T.components[source]
            if value != 0:
                terms.append(m * value)
        out[idx] = sp.Add(*terms)
    types = T.index_types[:slot] + (new_type,) + T.index_types[slot + 1:]
    return TensorField(T.chart, types, out)


def raise_index(T: TensorField, g: MetricField, slot: int) -> TensorField:
    """用 g^{ab} 把第 slot 个协变指标升为逆变指标"""
    if not 0 <= slot < T.rank or T.index_types[slot] != "l":
        raise ValueError(f"槽位 {slot} 不是协变指标: {T.index_types}")
    return _contract_slot(T, g.inverse_components, slot, "u")


def lower_index(T: TensorField, g: MetricField, slot: int) -> TensorField:
    """用 g_{ab} 把第 slot 个逆变指标降为协变指标"""
    if not 0 <= slot < T.rank or T.index_types[slot] != "u":
        raise ValueError(f"槽位 {slot} 不是逆变指标: {T.index_types}")
    return _contract_slot(T, g.components, slot, "l")


def kulkarni_nomizu(A: TensorField, B: TensorField) -> TensorField:
    """
    Kulkarni–Nomizu 积

    (A⊙B)_abcd = A_ac B_bd + A_bd B_ac − A_ad B_bc − A_bc B_ad

    参数：
    - A, B: 同一坐标卡上的对称 (0,2) 张量场（对称性由调用方保证）
    """
    for T in (A, B):
        if T.index_types != ("l", "l"):
            raise ValueError(f"Kulkarni–Nomizu 积要求 (0,2) 张量，收到 {T.index_types}")
    if A.chart.coordinates != B.chart.coordinates:
        raise ValueError("两个张量场不在同一坐标卡上")
    a, b = A.components, B.components

    def component(i, j, k, l):
        return a[i, k] * b[j, l] + a[j, l] * b[i, k] - a[i, l] * b[j, k] - a[j, k] * b[i, l]

    return TensorField.from_function(A.chart, ("l", "l", "l", "l"), component)


def signature_count(matrix: np.ndarray) -> int:
    """对称矩阵的负特征值个数"""
    return int(np.sum(np.linalg.eigvalsh(matrix) < 0))


def metric_invariants(g: MetricField, point: Sequence[float]) -> dict:
    """
    在一点检查度量不变量

    返回：
    - dict: symmetry（最大不对称量）、det、negative（负特征值个数）、
      signature_ok（与声明的号差一致）
    """
    matrix = g.evaluate(point)
    det = float(np.linalg.det(matrix))
    negative = signature_count(matrix) if abs(det) > settings.DET_MIN else -1
    return {
        "symmetry": float(np.max(np.abs(matrix - matrix.T))),
        "det": det,
        "negative": negative,
        "signature_ok": negative == g.signature.negative_count,
    }
