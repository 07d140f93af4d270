"""
动机计算
由内部变量（E、E_P、F）与迷失度D得到四种动机
"""

import math

from src.models.object import InternalState, Motivations


def _clamp(v: float) -> float:
    return min(1.0, max(0.0, v))


def compute_motivations(s: InternalState, disorientation: float = 0.0) -> Motivations:
    """
    计算动机

    m_E 随 E 降低而增大，但没有潜在能可转化时为0；m_EP = 1 − E_P；
    m_DA 即恐惧F；m_BKA 即迷失度D

    Args:
        s: 内部变量
        disorientation: 导航系统给出的迷失度D

    Returns:
        Motivations
    """
    e = _clamp(s.E)
    ep = _clamp(s.E_P)
    m_e = (1.0 - e) * math.sqrt(max(0.0, 1.0 - (1.0 - ep) ** 2))
    return Motivations(
        m_E=_clamp(m_e),
        m_EP=1.0 - ep,
        m_DA=_clamp(s.F),
        m_BKA=_clamp(disorientation),
    )
