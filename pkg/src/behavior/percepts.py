"""
视觉感知
从36扇区全景相机的灰度中提取各类资源的邻近度向量
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.models.object import RESOURCE_GRAY, ResourceKind
from src.utils.helpers import N_DIRECTIONS

WINDOW = 7


@dataclass
class Percepts:
    """各类资源的36维邻近度、最大邻近度与可用标志"""

    prox: Dict[ResourceKind, np.ndarray] = field(default_factory=dict)
    m_prox: Dict[ResourceKind, float] = field(default_factory=dict)
    usable: Dict[ResourceKind, bool] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "Percepts":
        return cls(
            prox={k: np.zeros(N_DIRECTIONS) for k in ResourceKind},
            m_prox={k: 0.0 for k in ResourceKind},
            usable={k: False for k in ResourceKind},
        )


def window_runs(mask: np.ndarray, window: int = WINDOW) -> np.ndarray:
    """
    对环形布尔序列，计算覆盖每个位置的连续段与以该位置为中心的窗口的交集长度 / window

    Args:
        mask: 各扇区是否为目标颜色
        window: 窗口宽度（奇数）

    Returns:
        每个扇区的邻近度，未着色扇区为0
    """
    n = len(mask)
    out = np.zeros(n)
    if not mask.any():
        return out
    if mask.all():
        out[:] = min(n, window) / window
        return out

    half = window // 2
    start = int(np.argmin(mask))  # 从一个未着色扇区展开，连续段不会跨越首尾
    rolled = np.roll(mask, -start)
    i = 0
    while i < n:
        if not rolled[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and rolled[j + 1]:
            j += 1
        for k in range(i, j + 1):
            covered = min(j, k + half) - max(i, k - half) + 1
            out[(k + start) % n] = covered / window
        i = j + 1
    return np.minimum(out, 1.0)


def compute_percepts(camera: np.ndarray) -> Percepts:
    """
    计算感知

    Args:
        camera: 36个扇区的灰度（0-255）

    Returns:
        Percepts，完整覆盖7扇区窗口时该资源可用
    """
    cam = np.asarray(camera)
    percepts = Percepts()
    for kind, gray in RESOURCE_GRAY.items():
        prox = window_runs(cam == gray)
        m = float(prox.max())
        percepts.prox[kind] = prox
        percepts.m_prox[kind] = m
        percepts.usable[kind] = m >= 1.0
    return percepts
