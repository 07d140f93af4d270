"""
导航系统
按控制周期串联：里程累计 → 定位 → 重新锚定 → 建图 → 迷失度 → 资源学习，
并为显著性计算提供 Plan / Expl / BKA 向量
"""

from typing import Optional, Tuple

import numpy as np

from src.behavior.percepts import Percepts
from src.behavior.salience import NavVectors
from src.models.object import Motivations, ResourceKind
from src.navigation.learning import learn_resource
from src.navigation.localization import localize, update_disorientation
from src.navigation.planning import (
    back_to_known_vector,
    exploration_vector,
    fuse_plan,
    plan_vectors,
)
from src.navigation.topo_map import KINDS, OdometryTrack, Signature, TopoMap, reanchor, update_map
from src.utils.config_loader import NavigationConfig
from src.utils.helpers import entropy, polar_to_xy
from src.utils.logger import get_logger

logger = get_logger(__name__)


class NavigationSystem:
    """持有地图、置信分布、里程锚点与迷失度的导航系统"""

    def __init__(self, cfg: NavigationConfig, topo: Optional[TopoMap] = None, disorientation: float = 0.0):
        self.cfg = cfg
        self.map = topo if topo is not None else TopoMap()
        n = len(self.map)
        self.belief = np.full(n, 1.0 / n) if n else np.zeros(0)
        self.track = OdometryTrack()
        self.disorientation = disorientation

    @property
    def current_node(self) -> Optional[int]:
        return int(np.argmax(self.belief)) if len(self.map) else None

    @property
    def max_belief(self) -> float:
        return float(self.belief.max()) if len(self.map) else 0.0

    @property
    def belief_entropy(self) -> float:
        return entropy(self.belief) if len(self.map) else 0.0

    def _prior(self) -> np.ndarray:
        n = len(self.map)
        prior = self.track.anchor_belief
        if prior is None or len(prior) != n:
            return np.full(n, 1.0 / n)
        return prior

    def update(
        self,
        odometry: Tuple[float, float],
        sig: Signature,
        percepts: Percepts,
        dt: float,
        acted: Optional[ResourceKind] = None,
        learn: bool = True,
    ) -> bool:
        """
        处理一个控制周期的感知

        Args:
            odometry: 本周期里程 (距离, 方位)
            sig: 当前签名
            percepts: 当前视觉感知
            dt: 控制周期（秒）
            acted: 本周期执行的补充动作对应的资源类型
            learn: 是否进行资源关联学习

        Returns:
            本周期是否新建了节点
        """
        self.track.offset = self.track.offset + polar_to_xy(*odometry)

        if len(self.map):
            self.belief = localize(self.map, self._prior(), self.track.displacement, sig, self.cfg)
            reanchor(self.map, self.track, self.belief)

        self.map, self.belief, created = update_map(self.map, self.belief, self.track, sig, self.cfg)
        self.disorientation = update_disorientation(
            self.disorientation, created, self.max_belief, dt, self.cfg
        )
        if learn:
            learn_resource(self.map, self.belief, percepts, dt, self.cfg, acted=acted)
        return created

    def resource_fields(self) -> dict:
        """各资源类型的36方向邻近度"""
        return {kind: plan_vectors(self.map, self.belief, kind, self.cfg) for kind in KINDS}

    def vectors(self, m: Motivations, planning: bool = True) -> NavVectors:
        """
        计算导航向量

        Args:
            m: 当前动机
            planning: False时Plan与BKA为零（仅保留探索）
        """
        expl = exploration_vector(self.map, self.belief, self.cfg)
        if not planning or len(self.map) == 0:
            return NavVectors(expl=expl)
        return NavVectors(
            plan=fuse_plan(self.resource_fields(), m),
            expl=expl,
            bka=back_to_known_vector(self.map, self.belief, self.cfg),
        )