"""
传感器模型
全景线性相机、8个声呐、里程计与罗盘，以及声呐避障反射
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.models.object import MotorCommand, MotorMode, Pose
from src.utils.config_loader import WorldConfig
from src.utils.helpers import SECTOR_ANGLES
from src.world.scene import Scene

N_SONAR = 8
SONAR_STEP = 360.0 / N_SONAR


@dataclass
class SensorFrame:
    """一个控制周期的全部感知"""

    camera: np.ndarray  # 36个方向的灰度，按罗盘估计的绝对方向排列
    sonar: np.ndarray  # 8个声呐距离，sonar[k] 指向 朝向+45k°
    odometry: Tuple[float, float]  # (距离, 罗盘方位)
    compass: float


def sense_camera(scene: Scene, pose: Pose, heading_error: float = 0.0) -> np.ndarray:
    """
    相机：每个10°扇区返回最近线段的灰度

    Args:
        scene: 场景
        pose: 真实位姿
        heading_error: 罗盘误差（罗盘读数 − 真实朝向），扇区按罗盘估计的方向对齐
    """
    _, gray = scene.cast(np.array([pose.x, pose.y]), SECTOR_ANGLES - heading_error, visual=True)
    return gray


def sense_sonar(scene: Scene, pose: Pose, rng: np.random.Generator, cfg: WorldConfig) -> np.ndarray:
    """声呐只探测墙体，方向扰动±5°，距离扰动±0.1m，结果限制在 [0, 量程]"""
    angles = pose.theta + np.arange(N_SONAR) * SONAR_STEP
    if cfg.noise:
        angles = angles + rng.uniform(-cfg.sonar_dir_noise, cfg.sonar_dir_noise, N_SONAR)
    dist, _ = scene.cast(np.array([pose.x, pose.y]), angles, visual=False)
    dist = np.minimum(dist, cfg.sonar_range)
    if cfg.noise:
        dist = dist + rng.uniform(-cfg.sonar_range_noise, cfg.sonar_range_noise, N_SONAR)
    return np.clip(dist, 0.0, cfg.sonar_range)


def sense_odometry_compass(
    true_delta: Tuple[float, float], rng: np.random.Generator, cfg: WorldConfig
) -> Tuple[Tuple[float, float], float]:
    """
    里程计与罗盘

    Args:
        true_delta: 真实 (移动距离, 当前朝向)

    Returns:
        ((测得距离, 罗盘方位), 罗盘读数)
    """
    distance, heading = true_delta
    if not cfg.noise:
        return (distance, heading % 360.0), heading % 360.0
    measured = distance * rng.uniform(1.0 - cfg.odo_noise, 1.0 + cfg.odo_noise)
    compass = (heading + rng.uniform(-cfg.compass_noise, cfg.compass_noise)) % 360.0
    return (measured, compass), compass


def allocentric_sonar(sonar: np.ndarray, compass: float) -> np.ndarray:
    """按罗盘把机体声呐重排到最近的45°绝对方向"""
    return np.roll(np.asarray(sonar, dtype=float), int(round(compass / SONAR_STEP)) % N_SONAR)


def sonar_clearance(sonar: np.ndarray) -> np.ndarray:
    """
    36个10°扇区方向上的净空距离，由8个45°绝对方向的声呐线性插值

    Args:
        sonar: allocentric_sonar 的结果，第k个对应45k°

    Returns:
        36维距离（米）
    """
    ranges = np.asarray(sonar, dtype=float)
    if ranges.shape != (N_SONAR,):
        raise ValueError(f"声呐读数必须为{N_SONAR}维，实际 {ranges.shape}")
    pos = SECTOR_ANGLES / SONAR_STEP
    lo = np.floor(pos).astype(int)
    frac = pos - lo
    return (1.0 - frac) * ranges[lo % N_SONAR] + frac * ranges[(lo + 1) % N_SONAR]


def reflex_override(
    sonar: np.ndarray, cmd: MotorCommand, compass: float, threshold: float = 0.30
) -> MotorCommand:
    """
    避障反射：移动指令且最近障碍小于阈值时，改为朝最远声呐方向移动

    Args:
        sonar: 8个声呐距离（机体坐标）
        cmd: 原指令
        compass: 罗盘读数，用于把声呐方向换算为绝对方向
        threshold: 触发距离（米）
    """
    if cmd.mode != MotorMode.MOVE:
        return cmd
    ranges = np.asarray(sonar, dtype=float)
    if ranges.min() >= threshold:
        return cmd
    best = int(np.argmax(ranges))
    return MotorCommand.move(compass + best * SONAR_STEP, speed=cmd.speed)
