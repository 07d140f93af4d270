"""
选择读出
背侧环路赢者通吃，腹侧环路按去抑制幅度加权的方向折中
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bg.gpr import LoopState, settle, zero_state
from src.models.object import Nucleus
from src.utils.config_loader import LoopConfig
from src.utils.helpers import N_DIRECTIONS, SECTOR_UNITS, wrap_deg

# 合力模长低于该值视为完全对称抵消
_RESULTANT_EPS = 1e-9


@dataclass
class SelectionReadout:
    """一次选择的结果"""

    dorsal: Optional[int] = None
    ventral: Optional[float] = None


def dorsal_select(ep_outputs: np.ndarray, theta_sel: float) -> Optional[int]:
    """
    背侧选择：EP输出最低的通道低于阈值时被选中，并列取最小索引

    Args:
        ep_outputs: 各通道EP输出
        theta_sel: 选择阈值

    Returns:
        被选中的通道索引，未选中时为None
    """
    ep = np.asarray(ep_outputs, dtype=float)
    if ep.size == 0:
        raise ValueError("EP输出为空")
    winner = int(np.argmin(ep))
    return winner if ep[winner] < theta_sel else None


def ventral_select(ep_outputs: np.ndarray, tonic: float, theta_v: float) -> Optional[float]:
    """
    腹侧选择：去抑制超过阈值的方向按去抑制幅度做向量合成

    Args:
        ep_outputs: 36个方向通道的EP输出
        tonic: 静息时的EP输出
        theta_v: 去抑制阈值

    Returns:
        [0, 360) 内的方向（度），无通道超过阈值或合力为零时为None
    """
    ep = np.asarray(ep_outputs, dtype=float)
    if ep.shape != (N_DIRECTIONS,):
        raise ValueError(f"腹侧EP输出必须为{N_DIRECTIONS}维，实际 {ep.size}")
    d = np.maximum(0.0, tonic - ep)
    d[d <= theta_v] = 0.0
    if not d.any():
        return None
    vx, vy = d @ SECTOR_UNITS
    if math.hypot(vx, vy) < _RESULTANT_EPS:
        return None
    return wrap_deg(math.degrees(math.atan2(vy, vx)))


def rest_state(
    cfg: LoopConfig,
    dt: Optional[float] = None,
    foreign_stn_sum: float = 0.0,
    max_time: float = 10.0,
    persistence_weight: float = 0.0,
) -> LoopState:
    """
    零外部显著性下从全零激活积分得到的静息状态

    persistence_weight 非零时P神经元输出照常回馈到显著性，得到闭环运行时的静息点
    """
    return settle(
        zero_state(cfg),
        np.zeros(cfg.n_channels),
        cfg,
        foreign_stn_sum=foreign_stn_sum,
        max_time=max_time,
        dt=dt,
        persistence_weight=persistence_weight,
    )


def tonic_output(state: LoopState) -> float:
    """静息状态下EP输出（各通道相同，取均值）"""
    return float(state.output(Nucleus.EP).mean())
