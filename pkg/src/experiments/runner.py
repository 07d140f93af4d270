"""
试验运行器
单次试验的闭环仿真、建图巡游与预建地图缓存
"""

import math
from contextlib import ExitStack
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from src.behavior.percepts import compute_percepts
from src.experiments.controller import AnimatController, Decision
from src.models.object import (
    MotorCommand,
    MotorMode,
    ResourceKind,
    StopCondition,
    TraceRecord,
    TrialResult,
)
from src.navigation.system import NavigationSystem
from src.navigation.topo_map import Signature, TopoMap
from src.utils.config_loader import ExperimentConfig, MapMismatchError
from src.utils.helpers import angle_diff
from src.utils.logger import get_logger, get_trial_logger
from src.world.scene import Scene, load_scene
from src.world.sensors import allocentric_sonar
from src.world.world import World

logger = get_logger(__name__)

# 建图巡游：朝向误差超过该角度时原地转向
TOUR_TURN_DEG = 15.0
# 到达路点的距离
TOUR_REACHED_M = 0.15


def trial_rngs(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """由试验种子派生世界与控制器两个独立的随机数流"""
    world_seq, ctrl_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(world_seq), np.random.default_rng(ctrl_seq)


def open_scene(exp: ExperimentConfig, hidden: List[str]) -> Scene:
    scene = load_scene(exp.scene, exp.world.resource_half_size)
    scene.hide(hidden)
    return scene


def run_trial(
    exp: ExperimentConfig,
    seed: int,
    trial_index: int = 0,
    series: str = "",
    topo: Optional[TopoMap] = None,
    trace_path: Optional[str] = None,
) -> TrialResult:
    """
    运行一次试验，直到死亡、超时或（按终止条件）首次补充E_P

    Args:
        exp: 补全后的实验配置
        seed: 试验种子
        trial_index: 试验序号
        series: 所属序列名
        topo: 预建地图（不会被修改），None表示从空地图开始
        trace_path: 轨迹JSONL输出路径

    Returns:
        TrialResult
    """
    scene = open_scene(exp, exp.trial_absent)
    if topo is not None and topo.scene and topo.scene != scene.name:
        raise MapMismatchError(f"地图属于场景 {topo.scene}，与当前场景 {scene.name} 不一致")

    world_rng, ctrl_rng = trial_rngs(seed)
    world = World(scene, exp.world, world_rng, state=exp.initial)
    controller = AnimatController(exp, topo.copy() if topo is not None else None, ctrl_rng)
    dt = exp.simulation.control_dt
    fear = exp.initial.F
    choice: Optional[str] = None
    time_to_reload: Optional[float] = None

    trial_logger = get_trial_logger(__name__, series, trial_index)
    trial_logger.debug(f"试验开始 seed={seed}")
    with ExitStack() as stack:
        trace = None
        if trace_path:
            Path(trace_path).parent.mkdir(parents=True, exist_ok=True)
            trace = stack.enter_context(open(trace_path, "w", encoding="utf-8"))

        while world.time < exp.duration_limit - 1e-9 and not world.dead:
            frame = world.sense()
            decision = controller.decide(frame, world.internal_state(fear), dt)
            cmd = decision.command

            if (
                exp.stop_condition == StopCondition.FIRST_RELOAD_EP
                and cmd.mode == MotorMode.RELOAD_EP
                and world.usable(ResourceKind.EP)
            ):
                choice = world.nearest_usable(ResourceKind.EP)
                time_to_reload = world.time
                break

            world.advance(cmd, dt)
            if trace is not None:
                trace.write(_trace_record(world, controller, decision).model_dump_json() + "\n")

    result = TrialResult(
        series=series,
        trial_index=trial_index,
        seed=seed,
        survival_time=round(world.time, 6),
        died=world.dead,
        choice=choice,
        time_to_reload=None if time_to_reload is None else round(time_to_reload, 6),
        final_E=world.metabolism.E,
        final_EP=world.metabolism.E_P,
        nodes=len(controller.nav.map),
        trace_path=trace_path,
    )
    trial_logger.info(
        f"试验完成: 时长 {result.survival_time:.1f}s, "
        f"{'死亡' if result.died else '存活'}, 选择 {choice}"
    )
    return result


def _trace_record(world: World, controller: AnimatController, decision: Decision) -> TraceRecord:
    nav = controller.nav
    return TraceRecord(
        t=round(world.time, 6),
        x=world.pose.x,
        y=world.pose.y,
        theta=world.pose.theta,
        E=world.metabolism.E,
        E_P=world.metabolism.E_P,
        D=nav.disorientation,
        action=decision.command.mode,
        dorsal=decision.dorsal_action,
        direction=decision.readout.ventral,
        node=nav.current_node,
        entropy=nav.belief_entropy,
    )


# ==================== 建图 ====================


def _tour_command(world: World, target: np.ndarray) -> MotorCommand:
    """按真实位姿驶向路点；指令方向换算到罗盘坐标"""
    dx, dy = target[0] - world.pose.x, target[1] - world.pose.y
    bearing = math.degrees(math.atan2(dy, dx))
    speed = 1.0 if abs(angle_diff(bearing, world.pose.theta)) <= TOUR_TURN_DEG else 0.0
    return MotorCommand.move(bearing + world.compass_error, speed=speed)


def build_map(
    exp: ExperimentConfig, seed: int, duration: Optional[float] = None
) -> TopoMap:
    """
    建图：场景带巡游路线时沿路线行驶，否则由仅探索的控制器漫游

    资源关联学习照常进行，mapping_absent 中的资源在建图期间不可见，代谢不消耗

    Args:
        exp: 补全后的实验配置
        seed: 建图种子
        duration: 最长建图时间（秒），默认取 map_build_limit

    Returns:
        构建好的拓扑地图
    """
    scene = open_scene(exp, exp.mapping_absent)
    limit = duration or exp.map_build_limit
    world_cfg = exp.world.model_copy(update={"drain_rate": 0.0})
    world_rng, ctrl_rng = trial_rngs(seed)
    world = World(scene, world_cfg, world_rng)
    dt = exp.simulation.control_dt

    tour = [np.array(p, dtype=float) for p in scene.doc.tour]
    if tour:
        nav = NavigationSystem(exp.navigation)
        waypoint = 0
        while world.time < limit - 1e-9 and waypoint < len(tour):
            frame = world.sense()
            sig = Signature(np.asarray(frame.camera, dtype=float), allocentric_sonar(frame.sonar, frame.compass))
            nav.update(frame.odometry, sig, compute_percepts(frame.camera), dt)
            if np.linalg.norm(tour[waypoint] - world.position) < TOUR_REACHED_M:
                waypoint += 1
                continue
            world.advance(_tour_command(world, tour[waypoint]), dt)
        if waypoint < len(tour):
            logger.warning(f"建图巡游在 {limit:.0f}s 内未完成: {waypoint}/{len(tour)} 个路点")
        topo = nav.map
    else:
        explore = exp.model_copy(update={"world": world_cfg, "planning": False})
        controller = AnimatController(explore, None, ctrl_rng)
        while world.time < limit - 1e-9:
            frame = world.sense()
            decision = controller.decide(frame, world.internal_state(), dt)
            world.advance(decision.command, dt)
        topo = controller.nav.map

    topo.scene = scene.name
    logger.info(f"建图完成 {scene.name}: {len(topo)} 个节点, {len(topo.edges)} 条边, 用时 {world.time:.1f}s")
    return topo


def prepare_map(exp: ExperimentConfig) -> Optional[TopoMap]:
    """
    取得试验用的预建地图：地图文件存在时直接读取，否则建图并写入该文件；
    未配置地图时返回None（从空地图开始）

    Raises:
        MapMismatchError: 地图与场景不一致
    """
    if not exp.map:
        return None
    scene_name = load_scene(exp.scene).name
    path = Path(exp.map)
    if path.exists():
        topo = TopoMap.load(path)
        if topo.scene and topo.scene != scene_name:
            raise MapMismatchError(f"地图 {path} 属于场景 {topo.scene}，与 {scene_name} 不一致")
        logger.info(f"使用预建地图 {path} ({len(topo)} 个节点)")
        return topo

    topo = build_map(exp, exp.seed_base)
    topo.save(path)
    return topo
