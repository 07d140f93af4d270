"""
动物体控制器
每个控制周期：感知 → 导航更新 → 动机 → 显著性 → 双环路积分 → 选择读出 → 指令 → 避障反射
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.behavior.motivation import compute_motivations
from src.behavior.percepts import Percepts, compute_percepts
from src.behavior.salience import (
    DORSAL_PERSISTENCE,
    VENTRAL_PERSISTENCE,
    NavVectors,
    dorsal_saliences,
    ventral_saliences,
)
from src.bg.coupled import CoupledLoops
from src.bg.selection import SelectionReadout
from src.models.object import (
    DorsalAction,
    InternalState,
    MotorCommand,
    MotorMode,
    Motivations,
    ResourceKind,
)
from src.navigation.system import NavigationSystem
from src.navigation.topo_map import Signature, TopoMap
from src.utils.config_loader import ExperimentConfig, SimulationConfig
from src.utils.helpers import SECTOR_ANGLES
from src.utils.logger import get_logger
from src.world.sensors import SensorFrame, allocentric_sonar, reflex_override, sonar_clearance

logger = get_logger(__name__)

DORSAL_MODES = {
    0: (DorsalAction.RELOAD_E, MotorMode.RELOAD_E, ResourceKind.E),
    1: (DorsalAction.RELOAD_EP, MotorMode.RELOAD_EP, ResourceKind.EP),
}


class ExplorationDrive:
    """随机探索：以随机方向为中心的高斯峰乘到探索向量上，定期或反射触发后重新抽取"""

    def __init__(self, sim: SimulationConfig, rng: np.random.Generator):
        self.period = sim.exploration_period_s
        self.width = sim.exploration_width_deg
        self.amplitude = sim.exploration_amplitude
        self.rng = rng
        self.elapsed = 0.0
        self.center = 0.0
        self.resample()

    def resample(self) -> None:
        self.center = float(self.rng.uniform(0.0, 360.0))
        self.elapsed = 0.0

    def shape(self, dt: float) -> np.ndarray:
        self.elapsed += dt
        if self.elapsed >= self.period:
            self.resample()
        diff = (SECTOR_ANGLES - self.center + 180.0) % 360.0 - 180.0
        return self.amplitude * np.exp(-0.5 * (diff / self.width) ** 2)


@dataclass
class Decision:
    """一个控制周期的决策结果"""

    command: MotorCommand
    readout: SelectionReadout
    motivations: Motivations
    percepts: Percepts
    created: bool = False
    reflex: bool = False

    @property
    def dorsal_action(self) -> Optional[DorsalAction]:
        if self.readout.dorsal is None:
            return None
        return DORSAL_MODES[self.readout.dorsal][0]


class AnimatController:
    """把导航、行为与双环路选择组合成完整控制器"""

    def __init__(
        self,
        exp: ExperimentConfig,
        topo: Optional[TopoMap],
        rng: np.random.Generator,
        learn: bool = True,
    ):
        """
        初始化控制器

        Args:
            exp: 补全后的实验配置
            topo: 初始拓扑地图（控制器会修改它）
            rng: 探索驱动使用的随机数发生器
            learn: 是否进行资源关联学习
        """
        self.exp = exp
        self.sim = exp.simulation
        self.loops = CoupledLoops(
            exp.dorsal, exp.ventral, exp.simulation, persistence=(DORSAL_PERSISTENCE, VENTRAL_PERSISTENCE)
        )
        self.nav = NavigationSystem(exp.navigation, topo)
        self.drive = ExplorationDrive(exp.simulation, rng) if exp.simulation.exploration_drive else None
        self.learn = learn
        self.acted: Optional[ResourceKind] = None
        self.last_dorsal: Optional[int] = None

    def openness(self, sonar: np.ndarray) -> np.ndarray:
        """各方向的净空比例：障碍在反射距离内为0，远于探索半径为1"""
        near = self.exp.world.reflex_distance
        far = max(self.exp.navigation.expl_radius, near + 0.1)
        return np.clip((sonar_clearance(sonar) - near) / (far - near), 0.0, 1.0)

    def _vectors(self, m: Motivations, dt: float, sonar: np.ndarray) -> NavVectors:
        nav = self.nav.vectors(m, planning=self.exp.planning)
        if self.drive is not None:
            nav.expl = nav.expl * self.drive.shape(dt)
        if self.sim.exploration_gating:
            nav.expl = nav.expl * self.openness(sonar)
        return nav

    def decide(self, frame: SensorFrame, internal: InternalState, dt: float) -> Decision:
        """
        根据本周期感知做出决策

        Args:
            frame: 传感器读数
            internal: 内部变量
            dt: 控制周期（秒）

        Returns:
            Decision
        """
        percepts = compute_percepts(frame.camera)
        sig = Signature(
            gray=np.asarray(frame.camera, dtype=float),
            sonar=allocentric_sonar(frame.sonar, frame.compass),
        )
        created = self.nav.update(frame.odometry, sig, percepts, dt, acted=self.acted, learn=self.learn)

        m = compute_motivations(internal, self.nav.disorientation)
        nav = self._vectors(m, dt, sig.sonar)
        variant = self.exp.salience
        s_dorsal = dorsal_saliences(percepts, m, self.loops.dorsal_persistence, variant)
        s_ventral = ventral_saliences(percepts, m, nav, self.loops.ventral_persistence, variant)
        readout = self.loops.step(s_dorsal, s_ventral)

        if readout.dorsal != self.last_dorsal:
            logger.debug(f"背侧选择变化: {self.last_dorsal} -> {readout.dorsal}")
            self.last_dorsal = readout.dorsal

        # 背侧选中的补充动作只在资源可用时执行，否则不占用运动
        dorsal = DORSAL_MODES[readout.dorsal] if readout.dorsal is not None else None
        if dorsal is not None and percepts.usable[dorsal[2]]:
            _, mode, kind = dorsal
            cmd = MotorCommand(mode=mode)
            self.acted = kind
        elif readout.ventral is not None:
            cmd = MotorCommand.move(readout.ventral)
            self.acted = None
        else:
            cmd = MotorCommand.idle()
            self.acted = None

        final = reflex_override(frame.sonar, cmd, frame.compass, self.exp.world.reflex_distance)
        reflex = final is not cmd
        if reflex:
            logger.debug(f"避障反射触发: 最近障碍 {float(np.min(frame.sonar)):.2f}m")
            if self.drive is not None:
                self.drive.resample()

        return Decision(
            command=final,
            readout=readout,
            motivations=m,
            percepts=percepts,
            created=created,
            reflex=reflex,
        )
