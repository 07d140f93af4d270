"""
节点与资源类型的Hebb关联学习及遗忘
"""

from typing import Optional

import numpy as np

from src.behavior.percepts import Percepts
from src.models.object import ResourceKind
from src.navigation.topo_map import KIND_COLUMN, KINDS, TopoMap
from src.utils.config_loader import NavigationConfig
from src.utils.logger import get_logger

logger = get_logger(__name__)


def learn_resource(
    topo: TopoMap,
    belief: np.ndarray,
    percepts: Percepts,
    dt: float,
    cfg: NavigationConfig,
    acted: Optional[ResourceKind] = None,
) -> TopoMap:
    """
    更新资源关联权重

    资源可用（或本周期正在补充该资源）时，置信度高于阈值的节点按置信度加权强化；
    当前最可能节点处看不到某类资源时，该节点对这类资源的权重指数衰减

    Args:
        topo: 拓扑地图（原地修改）
        belief: 归一化置信分布
        percepts: 当前感知
        dt: 时间步长（秒）
        cfg: 导航配置
        acted: 本周期执行补充动作对应的资源类型

    Returns:
        更新后的地图
    """
    if len(topo) == 0:
        return topo
    b = np.asarray(belief, dtype=float)
    active = b > cfg.learn_belief_min
    winner = int(np.argmax(b))
    decay = max(0.0, 1.0 - cfg.eta_minus * dt)

    for kind in KINDS:
        col = KIND_COLUMN[kind]
        w = topo.resource_w[:, col]
        if percepts.usable.get(kind, False) or acted == kind:
            before = w[winner]
            w[active] += cfg.eta_plus * b[active] * (1.0 - w[active])
            if before <= cfg.w_use < w[winner]:
                logger.debug(f"节点 {winner} 与资源 {kind.value} 建立关联: w={w[winner]:.3f}")
        elif percepts.m_prox.get(kind, 0.0) == 0.0 and w[winner] > 0.0:
            before = w[winner]
            w[winner] *= decay
            if before >= cfg.w_use > w[winner]:
                logger.debug(f"节点 {winner} 遗忘资源 {kind.value}")
    np.clip(topo.resource_w, 0.0, 1.0, out=topo.resource_w)
    return topo
