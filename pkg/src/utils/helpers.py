"""
辅助函数模块
角度换算、36方向分箱与概率工具
"""

import math

import numpy as np

N_DIRECTIONS = 36
SECTOR_DEG = 360.0 / N_DIRECTIONS

# 第i个方向通道的中心角度与单位向量
SECTOR_ANGLES = np.arange(N_DIRECTIONS) * SECTOR_DEG
SECTOR_UNITS = np.stack(
    [np.cos(np.deg2rad(SECTOR_ANGLES)), np.sin(np.deg2rad(SECTOR_ANGLES))], axis=1
)


def wrap_deg(angle: float) -> float:
    """将角度归一化到 [0, 360)"""
    return float(angle % 360.0)


def angle_diff(target: float, source: float) -> float:
    """
    计算从source转到target的有符号最小角差

    Returns:
        (-180, 180] 内的角度
    """
    d = (target - source) % 360.0
    return d - 360.0 if d > 180.0 else d


def bearing_bin(bearing: float) -> int:
    """方位角所属的10°方向通道"""
    return int(math.floor(wrap_deg(bearing) / SECTOR_DEG + 0.5)) % N_DIRECTIONS


def polar_to_xy(distance: float, bearing: float) -> np.ndarray:
    """极坐标（米、度）转平面向量"""
    rad = math.radians(bearing)
    return np.array([distance * math.cos(rad), distance * math.sin(rad)])


def xy_to_polar(vec: np.ndarray) -> tuple[float, float]:
    """平面向量转极坐标（米、度）"""
    return float(math.hypot(vec[0], vec[1])), wrap_deg(math.degrees(math.atan2(vec[1], vec[0])))


def triangular_deposit(vec: np.ndarray, bearing: float, value: float) -> None:
    """
    将数值按 (1, 0.5, 0.5) 三角权重写入方位所在通道及左右相邻通道（原地累加）

    Args:
        vec: 36维向量
        bearing: 方位（度）
        value: 写入值
    """
    k = bearing_bin(bearing)
    n = len(vec)
    vec[k] += value
    vec[(k - 1) % n] += 0.5 * value
    vec[(k + 1) % n] += 0.5 * value


def entropy(p: np.ndarray) -> float:
    """离散分布的熵（自然对数）"""
    q = p[p > 0]
    return float(-(q * np.log(q)).sum())
