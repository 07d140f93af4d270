"""
代谢模型
E随时间持续消耗，在E资源旁可将E_P无损转化为E，在E_P资源旁可补充E_P
"""

from dataclasses import dataclass

from src.models.object import MotorCommand, MotorMode
from src.utils.config_loader import WorldConfig

# 浮点累积误差下的死亡判定
DEATH_EPS = 1e-9


@dataclass
class Metabolism:
    E: float = 1.0
    E_P: float = 1.0
    dead: bool = False


def _clamp(v: float) -> float:
    return min(1.0, max(0.0, v))


def update_metabolism(
    met: Metabolism,
    cmd: MotorCommand,
    usable_e: bool,
    usable_ep: bool,
    dt: float,
    cfg: WorldConfig,
) -> Metabolism:
    """
    推进一个时间步的代谢

    Args:
        met: 当前代谢状态
        cmd: 本周期执行的指令
        usable_e: E资源是否可用
        usable_ep: E_P资源是否可用
        dt: 时间步长（秒）
        cfg: 世界配置（消耗与补充速率）

    Returns:
        新的代谢状态
    """
    if met.dead:
        return Metabolism(0.0, met.E_P, True)

    e, ep = met.E, met.E_P
    if cmd.mode == MotorMode.RELOAD_E and usable_e:
        transfer = min(cfg.reload_rate * dt, ep, 1.0 - e)
        e += transfer
        ep -= transfer
    elif cmd.mode == MotorMode.RELOAD_EP and usable_ep:
        ep += cfg.reload_rate * dt

    e = _clamp(e - cfg.drain_rate * dt)
    ep = _clamp(ep)
    if e <= DEATH_EPS:
        return Metabolism(0.0, ep, True)
    return Metabolism(e, ep, False)
