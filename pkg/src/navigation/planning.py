"""
导航向量
资源邻近度场 P(res)、规划融合 Plan、探索向量 Expl 与回到熟悉区域向量 BKA
"""

from typing import Dict, Iterable, Mapping

import numpy as np

from src.models.object import Motivations, ResourceKind
from src.navigation.topo_map import TopoMap
from src.utils.config_loader import NavigationConfig
from src.utils.helpers import N_DIRECTIONS, bearing_bin, triangular_deposit, xy_to_polar


def _proximity_field(
    topo: TopoMap,
    current: int,
    sources: Iterable[int],
    strengths: Mapping[int, float],
    lambda_d: float,
) -> np.ndarray:
    """
    对当前节点的每条出边，取各源节点经该边的最大邻近度 w·exp(−路径长/λ_d)，
    按边方位三角分布写入，分量截断到1
    """
    vec = np.zeros(N_DIRECTIONS)
    sources = list(sources)
    if not sources:
        return vec
    for nbr, d_e, bearing in topo.neighbors(current):
        dist, _ = topo.shortest_paths(nbr)
        best = 0.0
        for s in sources:
            if np.isfinite(dist[s]):
                best = max(best, strengths[s] * float(np.exp(-(d_e + dist[s]) / lambda_d)))
        if best > 0:
            triangular_deposit(vec, bearing, best)
    return np.minimum(vec, 1.0)


def plan_vectors(
    topo: TopoMap, belief: np.ndarray, kind: ResourceKind, cfg: NavigationConfig
) -> np.ndarray:
    """
    某类资源在36个方向上的邻近度 P(kind)

    Args:
        topo: 拓扑地图
        belief: 置信分布，取最可能节点为当前位置
        kind: 资源类型
        cfg: 导航配置

    Returns:
        36维向量，无关联节点或空地图时为零向量
    """
    if len(topo) == 0:
        return np.zeros(N_DIRECTIONS)
    w = topo.weights(kind)
    sources = np.flatnonzero(w > cfg.w_use)
    current = int(np.argmax(belief))
    return _proximity_field(topo, current, sources, {int(s): float(w[s]) for s in sources}, cfg.lambda_d)


def fuse_plan(p: Dict[ResourceKind, np.ndarray], m: Motivations) -> np.ndarray:
    """Plan = 1 − Π(1 − m·P) 对E与E_P，再减去 m_DA·P(DA)，限制在 [0, 1]"""
    zeros = np.zeros(N_DIRECTIONS)
    keep = (1.0 - m.m_E * p.get(ResourceKind.E, zeros)) * (1.0 - m.m_EP * p.get(ResourceKind.EP, zeros))
    plan = 1.0 - keep - m.m_DA * p.get(ResourceKind.DA, zeros)
    return np.clip(plan, 0.0, 1.0)


def exploration_vector(topo: TopoMap, belief: np.ndarray, cfg: NavigationConfig) -> np.ndarray:
    """
    探索向量：统计当前节点周围（路径距离内）各方向已有的节点数，
    Expl_i = 1 − min(计数, 上限)/上限

    节点的相对位置由最短路径树上各边向量累加得到
    """
    if len(topo) == 0:
        return np.ones(N_DIRECTIONS)
    current = int(np.argmax(belief))
    dist, pred = topo.shortest_paths(current)
    positions: Dict[int, np.ndarray] = {current: np.zeros(2)}

    def position(node: int) -> np.ndarray:
        chain = []
        while node not in positions:
            chain.append(node)
            node = int(pred[node])
        pos = positions[node]
        for child in reversed(chain):
            pos = pos + topo.edge_vector(int(pred[child]), child)
            positions[child] = pos
        return pos

    counts = np.zeros(N_DIRECTIONS)
    for node in np.flatnonzero((dist > 0) & (dist <= cfg.expl_radius)):
        offset = position(int(node))
        r, bearing = xy_to_polar(offset)
        if r > 0:
            counts[bearing_bin(bearing)] += 1
    return 1.0 - np.minimum(counts, cfg.expl_cap) / cfg.expl_cap


def back_to_known_vector(topo: TopoMap, belief: np.ndarray, cfg: NavigationConfig) -> np.ndarray:
    """回到访问次数最多的节点的邻近度场；已在该节点或地图不足两个节点时为零向量"""
    if len(topo) <= 1:
        return np.zeros(N_DIRECTIONS)
    source = int(np.argmax(topo.visits))
    current = int(np.argmax(belief))
    if current == source:
        return np.zeros(N_DIRECTIONS)
    return _proximity_field(topo, current, [source], {source: 1.0}, cfg.lambda_d)
