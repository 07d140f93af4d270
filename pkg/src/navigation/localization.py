"""
基于拓扑地图的概率自定位与迷失度估计
"""

from typing import Tuple, Union

import numpy as np

from src.navigation.topo_map import Signature, TopoMap
from src.utils.config_loader import NavigationConfig
from src.utils.logger import get_logger

logger = get_logger(__name__)

# 位移小于该值时不比较方位
_STILL = 1e-6


def _gauss(x: Union[float, np.ndarray], sigma: float) -> np.ndarray:
    return np.exp(-0.5 * (np.asarray(x, dtype=float) / sigma) ** 2)


def transition_matrix(
    topo: TopoMap, displacement: Tuple[float, float], cfg: NavigationConfig
) -> np.ndarray:
    """
    预测步的转移核（按行归一化）

    节点自身的权重为 self_loop + G(里程距离)，沿边转移的权重为
    G(边长 − 里程距离) × G_角(边方位 − 里程方位)；只对地图中的边计算
    """
    distance, bearing = displacement
    n = len(topo)
    src, dst, d_e, b_e = topo.edge_arrays()
    w = _gauss(d_e - distance, cfg.odo_sigma)
    if distance >= _STILL:
        turn = (b_e - bearing + 180.0) % 360.0 - 180.0
        w = w * _gauss(turn, cfg.bearing_sigma)
    kernel = np.zeros((n, n))
    np.fill_diagonal(kernel, cfg.self_loop + float(_gauss(distance, cfg.odo_sigma)))
    np.add.at(kernel, (src, dst), w)
    return kernel / kernel.sum(axis=1, keepdims=True)


def localize(
    topo: TopoMap,
    belief: np.ndarray,
    displacement: Tuple[float, float],
    sig: Signature,
    cfg: NavigationConfig,
) -> np.ndarray:
    """
    贝叶斯滤波：沿与里程一致的边扩散概率，再乘以签名相似度的κ次方

    Args:
        topo: 非空拓扑地图
        belief: 先验置信分布
        displacement: 本次里程位移 (距离, 方位)
        sig: 当前签名
        cfg: 导航配置

    Returns:
        归一化后的后验分布；全零时重置为均匀分布
    """
    n = len(topo)
    if n == 0:
        raise ValueError("地图为空，无法定位")
    prior = np.asarray(belief, dtype=float)
    if prior.shape != (n,):
        raise ValueError(f"置信分布维度 {prior.shape} 与节点数 {n} 不一致")

    predicted = prior @ transition_matrix(topo, displacement, cfg)
    likelihood = np.clip(topo.similarities(sig), 0.0, 1.0) ** cfg.kappa
    posterior = predicted * likelihood
    total = posterior.sum()
    if not np.isfinite(total) or total <= 0:
        logger.warning(f"定位后验全为零，重置为均匀分布（{n} 个节点）")
        return np.full(n, 1.0 / n)
    return posterior / total


def update_disorientation(
    d: float, created: bool, max_belief: float, dt: float, cfg: NavigationConfig
) -> float:
    """建图时迷失度上升，在熟悉区域停留时下降，结果限制在 [0, 1]"""
    if created:
        d += cfg.d_create
    elif max_belief > cfg.d_belief:
        d -= cfg.d_decay * dt
    return min(1.0, max(0.0, d))
