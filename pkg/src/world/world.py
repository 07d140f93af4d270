"""
仿真世界
真实位姿、运动学、时钟与代谢，对外提供带噪声的感知
"""

import math
from typing import Optional

import numpy as np

from src.models.object import InternalState, MotorCommand, MotorMode, Pose, ResourceKind
from src.utils.config_loader import WorldConfig
from src.utils.helpers import angle_diff
from src.utils.logger import get_logger
from src.world.metabolism import Metabolism, update_metabolism
from src.world.scene import Scene
from src.world.sensors import SensorFrame, sense_camera, sense_odometry_compass, sense_sonar

logger = get_logger(__name__)


class World:
    """单次试验的世界状态"""

    def __init__(
        self,
        scene: Scene,
        cfg: WorldConfig,
        rng: np.random.Generator,
        pose: Optional[Pose] = None,
        state: Optional[InternalState] = None,
    ):
        self.scene = scene
        self.cfg = cfg
        self.rng = rng
        self.pose = (pose or scene.doc.start).model_copy()
        state = state or InternalState()
        self.metabolism = Metabolism(state.E, state.E_P, False)
        self.time = 0.0
        self.compass_error = 0.0
        self.last_distance = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.pose.x, self.pose.y])

    @property
    def dead(self) -> bool:
        return self.metabolism.dead

    def sense(self) -> SensorFrame:
        """读取本周期的全部传感器；上一步的真实位移经里程计给出后清零"""
        odometry, compass = sense_odometry_compass((self.last_distance, self.pose.theta), self.rng, self.cfg)
        self.compass_error = angle_diff(compass, self.pose.theta)
        self.last_distance = 0.0
        return SensorFrame(
            camera=sense_camera(self.scene, self.pose, self.compass_error),
            sonar=sense_sonar(self.scene, self.pose, self.rng, self.cfg),
            odometry=odometry,
            compass=compass,
        )

    def _distances(self, kind: ResourceKind) -> list:
        return [
            (math.hypot(r.cx - self.pose.x, r.cy - self.pose.y), r.name)
            for r in self.scene.present_resources(kind)
        ]

    def usable(self, kind: ResourceKind) -> bool:
        """存在的该类资源中心距离小于可用距离"""
        return any(d < self.cfg.usable_distance for d, _ in self._distances(kind))

    def nearest_usable(self, kind: ResourceKind) -> Optional[str]:
        usable = [(d, name) for d, name in self._distances(kind) if d < self.cfg.usable_distance]
        return min(usable)[1] if usable else None

    def internal_state(self, fear: float = 0.0) -> InternalState:
        return InternalState(E=self.metabolism.E, E_P=self.metabolism.E_P, F=fear)

    def advance(self, cmd: MotorCommand, dt: float) -> None:
        """执行指令一个时间步：先判定资源可用性，再运动，最后更新代谢"""
        usable_e = self.usable(ResourceKind.E)
        usable_ep = self.usable(ResourceKind.EP)
        step_world(self, cmd, dt)
        self.metabolism = update_metabolism(self.metabolism, cmd, usable_e, usable_ep, dt, self.cfg)
        if self.metabolism.dead:
            logger.debug(f"能量耗尽 t={self.time:.1f}s")


def step_world(world: World, cmd: MotorCommand, dt: float) -> World:
    """
    运动学：先以不超过 ω_max·dt 的角度转向目标方向，再沿当前朝向平移；
    平移后与墙体距离小于半径时停在原地（不滑动）

    目标方向是罗盘坐标下的方向，按本周期罗盘误差换算为真实方向
    """
    if cmd.mode == MotorMode.MOVE and cmd.direction is not None:
        cfg = world.cfg
        target = cmd.direction - world.compass_error
        turn = angle_diff(target, world.pose.theta)
        max_turn = cfg.omega_max * dt
        turn = max(-max_turn, min(max_turn, turn))
        theta = (world.pose.theta + turn) % 360.0

        step = cfg.v_max * cmd.speed * dt
        rad = math.radians(theta)
        nx = world.pose.x + step * math.cos(rad)
        ny = world.pose.y + step * math.sin(rad)
        if step > 0 and world.scene.min_wall_distance(np.array([nx, ny])) >= cfg.radius:
            world.pose = Pose(x=nx, y=ny, theta=theta)
            world.last_distance += step
        else:
            world.pose = Pose(x=world.pose.x, y=world.pose.y, theta=theta)
    world.time += dt
    return world
