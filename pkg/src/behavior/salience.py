"""
显著性计算
将感知、动机、导航向量与P神经元输出（持续性）合成两条环路的显著性
"""

from dataclasses import dataclass, field

import numpy as np

from src.behavior.percepts import Percepts
from src.models.object import Motivations, ResourceKind, SalienceVariantName
from src.utils.config_loader import SalienceVariant
from src.utils.helpers import N_DIRECTIONS

DORSAL_PERSISTENCE = 0.4
VENTRAL_PERSISTENCE = 0.2


def _zeros() -> np.ndarray:
    return np.zeros(N_DIRECTIONS)


@dataclass
class NavVectors:
    """导航系统给出的规划、探索与回到熟悉区域向量"""

    plan: np.ndarray = field(default_factory=_zeros)
    expl: np.ndarray = field(default_factory=_zeros)
    bka: np.ndarray = field(default_factory=_zeros)


def _sqrt(vec: np.ndarray, label: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (N_DIRECTIONS,):
        raise ValueError(f"{label} 必须为{N_DIRECTIONS}维")
    if (v < 0).any():
        raise ValueError(f"{label} 含负分量，无法开方")
    return np.sqrt(v)


def dorsal_saliences(
    p: Percepts, m: Motivations, persistence: np.ndarray, v: SalienceVariant
) -> np.ndarray:
    """
    背侧环路显著性 [S_E, S_EP]

    Args:
        p: 感知
        m: 动机
        persistence: 背侧P神经元输出（2维）
        v: 显著性变体

    Returns:
        2维显著性向量
    """
    p_e, p_ep = float(persistence[0]), float(persistence[1])
    a_e = 1.0 if p.usable[ResourceKind.E] else 0.0
    a_ep = 1.0 if p.usable[ResourceKind.EP] else 0.0
    mp_e = p.m_prox[ResourceKind.E]
    mp_ep = p.m_prox[ResourceKind.EP]

    if v.name == SalienceVariantName.EXP32:
        s_e = DORSAL_PERSISTENCE * p_e + 0.9 * a_e * m.m_E + 0.1 * mp_e * m.m_E
        s_ep = DORSAL_PERSISTENCE * p_ep + 0.9 * a_ep * m.m_EP + 0.1 * mp_ep * m.m_EP
    else:
        s_e = DORSAL_PERSISTENCE * p_e + 1.2 * a_e * m.m_E + 0.6 * mp_e * m.m_E
        s_ep = DORSAL_PERSISTENCE * p_ep + 1.0 * a_ep * m.m_EP + 0.2 * mp_ep * m.m_EP
    return np.array([s_e, s_ep])


def ventral_saliences(
    p: Percepts,
    m: Motivations,
    nav: NavVectors,
    persistence: np.ndarray,
    v: SalienceVariant,
) -> np.ndarray:
    """
    腹侧环路36个方向的显著性

    Args:
        p: 感知
        m: 动机
        nav: 导航向量
        persistence: 腹侧P神经元输出（36维）
        v: 显著性变体

    Returns:
        36维显著性向量
    """
    plan = _sqrt(nav.plan, "Plan")
    taxon_e = _sqrt(p.prox[ResourceKind.E], "Prox(E)")
    taxon_ep = _sqrt(p.prox[ResourceKind.EP], "Prox(E_P)")
    mp_e = p.m_prox[ResourceKind.E]
    mp_ep = p.m_prox[ResourceKind.EP]
    persistence = np.asarray(persistence, dtype=float)

    s = VENTRAL_PERSISTENCE * persistence + 0.4 * nav.bka * m.m_BKA
    explore_gain = 0.05 * (1.0 - mp_ep) * m.m_EP + 0.05 * (1.0 - mp_e) * m.m_E

    if v.name == SalienceVariantName.EXP31:
        danger = 1.0 - p.prox[ResourceKind.DA]
        s = s + 0.45 * plan + 0.35 * taxon_e * m.m_E + 0.35 * taxon_ep * m.m_EP
        s = s + 0.19 * danger * m.m_DA
        return s + nav.expl * (0.05 + explore_gain)

    if v.name == SalienceVariantName.EXP32:
        # 资源已在视野中时规划项让位于趋向项
        s = s + 0.55 * plan * (1.0 - mp_e) * (1.0 - mp_ep)
    else:
        s = s + v.w_plan * plan
    s = s + 0.55 * taxon_e * m.m_E + v.w_taxon_ep * taxon_ep * m.m_EP
    return s + nav.expl * (0.25 + explore_gain)
