"""
统计检验
Mann-Whitney U检验（小样本精确枚举，含并列的秩按中位秩处理）与Fisher精确检验
"""

from math import comb
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import stats

# 每组样本数不超过该值时使用精确分布
EXACT_MAX_N = 12


def _check_samples(xs: Sequence[float], ys: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("U检验的两组样本都不能为空")
    return x, y


def _doubled_rank_sums(doubled_ranks: np.ndarray, k: int) -> Dict[int, int]:
    """
    从全部（2倍中位秩）中任取k个，各种秩和出现的次数

    中位秩的2倍总是整数，动态规划在整数上进行
    """
    ways = [dict() for _ in range(k + 1)]
    ways[0][0] = 1
    for r in doubled_ranks:
        for size in range(min(k, len(doubled_ranks)) - 1, -1, -1):
            for total, count in ways[size].items():
                key = total + int(r)
                ways[size + 1][key] = ways[size + 1].get(key, 0) + count
    return ways[k]


def _exact_counts(x: np.ndarray, y: np.ndarray) -> Tuple[Dict[int, int], int, int]:
    """返回 (2U1 的置换分布计数, 观测到的 2U1, 总排列数)"""
    n1, n2 = len(x), len(y)
    ranks = stats.rankdata(np.concatenate([x, y]))
    doubled = np.rint(2 * ranks).astype(int)
    offset = n1 * (n1 + 1)
    dist = {s - offset: c for s, c in _doubled_rank_sums(doubled, n1).items()}
    observed = int(doubled[:n1].sum()) - offset
    return dist, observed, comb(n1 + n2, n1)


def mann_whitney_u(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """
    双侧Mann-Whitney U检验

    Args:
        xs: 第一组样本
        ys: 第二组样本

    Returns:
        (U, p)，U取 min(U1, U2)；两组均不超过12个样本时p为精确置换概率，
        否则为带并列校正与连续性校正的正态近似
    """
    x, y = _check_samples(xs, ys)
    n1, n2 = len(x), len(y)
    if n1 <= EXACT_MAX_N and n2 <= EXACT_MAX_N:
        dist, observed, total = _exact_counts(x, y)
        center = n1 * n2
        dev = abs(observed - center)
        hits = sum(c for s, c in dist.items() if abs(s - center) >= dev)
        u1 = observed / 2.0
        return min(u1, n1 * n2 - u1), min(1.0, hits / total)

    res = stats.mannwhitneyu(x, y, alternative="two-sided", method="asymptotic", use_continuity=True)
    u1 = float(res.statistic)
    return min(u1, n1 * n2 - u1), float(res.pvalue)


def mann_whitney_one_sided(xs: Sequence[float], ys: Sequence[float]) -> float:
    """单侧检验 xs 倾向大于 ys 的p值，P(U1 ≥ 观测值)"""
    x, y = _check_samples(xs, ys)
    n1, n2 = len(x), len(y)
    if n1 <= EXACT_MAX_N and n2 <= EXACT_MAX_N:
        dist, observed, total = _exact_counts(x, y)
        return sum(c for s, c in dist.items() if s >= observed) / total
    res = stats.mannwhitneyu(x, y, alternative="greater", method="asymptotic", use_continuity=True)
    return float(res.pvalue)


def fisher_exact(a: int, b: int, c: int, d: int) -> float:
    """
    2×2列联表 [[a, b], [c, d]] 的双侧Fisher精确检验

    Returns:
        概率不超过观测表的所有表的概率之和
    """
    table = [[a, b], [c, d]]
    if min(a, b, c, d) < 0:
        raise ValueError(f"列联表计数不能为负: {table}")
    _, p = stats.fisher_exact(table, alternative="two-sided")
    return float(min(1.0, p))
