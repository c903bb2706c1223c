"""
采样工具

伪随机数算法固定为 numpy 的 PCG64（Generator(PCG64(seed))），同一种子在任何平台上
产生同一组采样点。定义域外的点按 (seed, 点序号, 第几次重采样) 派生独立的子流重新抽样。
"""
import math
from typing import Iterable, Sequence
import numpy as np
from app.config import settings


def generator(*seed) -> np.random.Generator:
    """以整数或整数序列为种子构造 PCG64 生成器"""
    key = list(seed) if len(seed) > 1 else seed[0]
    return np.random.Generator(np.random.PCG64(key))


def sample_points(box: Sequence, count: int, seed: int) -> np.ndarray:
    """
    在采样盒内均匀抽取 count 个点

    参数：
    - box: 每个坐标的区间 (lo, hi)
    - count: 点数
    - seed: 随机种子

    返回：
    - (count, dim) 数组，行顺序就是点序号
    """
    rng = generator(seed)
    lows = np.array([lo for lo, _ in box], dtype=float)
    highs = np.array([hi for _, hi in box], dtype=float)
    return rng.uniform(lows, highs, size=(count, len(box)))


def resample_point(box: Sequence, seed: int, index: int, attempt: int) -> np.ndarray:
    """第 index 个点的第 attempt 次重采样（与其它点、其它检查互不影响）"""
    rng = generator(seed, index, attempt)
    lows = np.array([lo for lo, _ in box], dtype=float)
    highs = np.array([hi for _, hi in box], dtype=float)
    return rng.uniform(lows, highs)


def shrink_interval(
    lo: float,
    hi: float,
    singular: Iterable[float],
    margin: float = None,
) -> tuple:
    """
    从 [lo, hi] 中去掉奇异点（各留 margin 余量），返回最长的剩余子区间

    等长时取靠右的一段。没有剩余区间时返回 None。
    """
    margin = settings.BOX_MARGIN if margin is None else margin
    cuts = sorted(float(s) for s in singular if lo - margin < s < hi + margin)
    pieces = []
    start = lo
    for s in cuts:
        pieces.append((start, s - margin))
        start = max(start, s + margin)
    pieces.append((start, hi))
    pieces = [(a, b) for a, b in pieces if b - a > margin]
    if not pieces:
        return None
    best = max(pieces, key=lambda p: (round(p[1] - p[0], 12), p[0]))
    return float(best[0]), float(best[1])


def default_interval() -> tuple:
    half = settings.BOX_HALF_WIDTH
    return -half, half


def conformal_half_width(c: float, dimension: int) -> float:
    """
    共形模型 (1 + (c/4)η(x,x))^{-2}η 的采样半宽：保证 |c/4·η(x,x)| ≤ ½

    c = 0 时返回默认半宽。
    """
    half = settings.BOX_HALF_WIDTH
    if c == 0:
        return half
    return min(half, math.sqrt(2.0 / (abs(c) * dimension)))
