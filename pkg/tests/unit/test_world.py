"""
仿真世界单元测试

包括：
- 场景读取与射线投射
- 相机、声呐、里程计与罗盘
- 避障反射
- 运动学、碰撞与资源可用性
- 代谢
"""

import math

import numpy as np
import pytest

from src.models.object import InternalState, MotorCommand, MotorMode, Pose, ResourceKind
from src.utils.config_loader import ConfigError, WorldConfig
from src.world.metabolism import Metabolism, update_metabolism
from src.world.scene import Scene, load_scene
from src.world.sensors import (
    allocentric_sonar,
    reflex_override,
    sense_camera,
    sense_odometry_compass,
    sense_sonar,
    sonar_clearance,
)
from src.world.world import World

DT = 0.1


def resource(kind: ResourceKind, cx: float, cy: float, name: str = "") -> dict:
    return {"name": name, "kind": kind.value, "cx": cx, "cy": cy}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


# ==================== 场景 ====================


@pytest.mark.unit
class TestScene:
    """场景与射线投射测试"""

    def test_camera_sees_resource(self, box_doc):
        scene = Scene(box_doc(resources=[resource(ResourceKind.E, 2.6, 2.0)]))
        cam = sense_camera(scene, Pose(x=2.0, y=2.0, theta=0.0))
        for sector in (33, 34, 35, 0, 1, 2, 3):
            assert cam[sector] == 255
        assert cam[4] == 200
        assert cam[32] == 200
        assert cam[18] == 200

    def test_camera_aligned_to_compass_estimate(self, box_doc):
        scene = Scene(box_doc(resources=[resource(ResourceKind.E, 2.6, 2.0)]))
        cam = sense_camera(scene, Pose(x=2.0, y=2.0, theta=0.0), heading_error=20.0)
        assert cam[2] == 255
        assert cam[5] == 255
        assert cam[33] == 200

    def test_hidden_resource_invisible(self, box_doc):
        scene = Scene(box_doc(resources=[resource(ResourceKind.EP, 2.6, 2.0, "food")]))
        scene.set_present("food", False)
        cam = sense_camera(scene, Pose(x=2.0, y=2.0))
        assert (cam == 200).all()
        assert scene.present_resources() == []

    def test_hide_unknown(self, box_scene):
        with pytest.raises(KeyError):
            box_scene.hide(["nothing"])

    def test_document_not_modified(self, box_doc):
        doc = box_doc(resources=[resource(ResourceKind.EP, 1.0, 1.0, "food")])
        Scene(doc).set_present("food", False)
        assert doc.resources[0].present

    def test_cast_misses_outside_range(self, box_scene):
        dist, gray = box_scene.cast(np.array([2.0, 2.0]), np.array([0.0]), max_range=1.0)
        assert math.isinf(dist[0])
        assert gray[0] == 0

    def test_min_wall_distance(self, box_scene):
        assert box_scene.min_wall_distance(np.array([0.5, 2.0])) == pytest.approx(0.5)
        assert box_scene.min_wall_distance(np.array([2.0, 2.0])) == pytest.approx(2.0)

    def test_load_scene(self, box_doc, write_scene):
        path = write_scene(box_doc(name=""), "arena.json")
        scene = load_scene(path)
        assert scene.name == "arena"
        assert len(scene.walls) == 4

    def test_load_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_scene(tmp_path / "none.json")

    def test_load_invalid(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"bounds": [0, 0, 1], "segments": []}', encoding="utf-8")
        with pytest.raises(ConfigError):
            load_scene(path)

    def test_duplicate_resource_names(self, box_doc):
        with pytest.raises(ValueError):
            box_doc(resources=[resource(ResourceKind.E, 1, 1, "a"), resource(ResourceKind.EP, 2, 2, "a")])

    def test_bundled_scenes_load(self, scenes_dir):
        for path in sorted(scenes_dir.glob("*.json")):
            scene = load_scene(path)
            assert scene.present_resources()
            start = np.array([scene.doc.start.x, scene.doc.start.y])
            assert scene.min_wall_distance(start) > 0.15


# ==================== 传感器 ====================


@pytest.mark.unit
class TestSensors:
    """传感器测试"""

    def test_sonar_without_noise(self, box_scene, rng, quiet_world_cfg):
        sonar = sense_sonar(box_scene, Pose(x=2.0, y=2.0, theta=0.0), rng, quiet_world_cfg)
        expected = [2.0, 2.0 * math.sqrt(2.0)] * 4
        np.testing.assert_allclose(sonar, expected, rtol=1e-9)

    def test_sonar_range_limit(self, box_doc, rng, quiet_world_cfg):
        scene = Scene(box_doc(size=20.0))
        sonar = sense_sonar(scene, Pose(x=10.0, y=10.0), rng, quiet_world_cfg)
        np.testing.assert_allclose(sonar, 5.0)

    def test_sonar_noise_bounds(self, box_scene, rng):
        cfg = WorldConfig()
        pose = Pose(x=1.0, y=2.0, theta=180.0)
        for _ in range(200):
            d = sense_sonar(box_scene, pose, rng, cfg)[0]
            assert 0.9 - 1e-9 <= d <= 1.0 / math.cos(math.radians(5.0)) + 0.1 + 1e-9

    def test_sonar_ignores_resources(self, box_doc, rng, quiet_world_cfg):
        scene = Scene(box_doc(resources=[resource(ResourceKind.EP, 2.6, 2.0)]))
        sonar = sense_sonar(scene, Pose(x=2.0, y=2.0), rng, quiet_world_cfg)
        assert sonar[0] == pytest.approx(2.0)

    def test_odometry_without_noise(self, rng, quiet_world_cfg):
        (dist, bearing), compass = sense_odometry_compass((0.04, 370.0), rng, quiet_world_cfg)
        assert dist == pytest.approx(0.04)
        assert bearing == pytest.approx(10.0)
        assert compass == pytest.approx(10.0)

    def test_odometry_and_compass_noise_bounds(self, rng):
        cfg = WorldConfig()
        for _ in range(500):
            (dist, bearing), compass = sense_odometry_compass((0.04, 90.0), rng, cfg)
            assert 0.038 - 1e-12 <= dist <= 0.042 + 1e-12
            assert bearing == compass
            assert 80.0 <= compass <= 100.0

    def test_allocentric_sonar(self):
        sonar = np.arange(8.0)
        np.testing.assert_allclose(allocentric_sonar(sonar, 0.0), sonar)
        rolled = allocentric_sonar(sonar, 92.0)
        assert rolled[2] == 0.0
        assert rolled[3] == 1.0

    def test_clearance_interpolates_beams(self):
        sonar = np.arange(8.0) + 1.0
        clearance = sonar_clearance(sonar)
        assert clearance.shape == (36,)
        assert clearance[0] == pytest.approx(1.0)
        assert clearance[9] == pytest.approx(3.0)  # 90°正对2号声呐
        assert clearance[2] == pytest.approx((25.0 * 1.0 + 20.0 * 2.0) / 45.0)
        # 350°位于315°与0°之间，跨越首尾
        assert clearance[35] == pytest.approx((10.0 * 8.0 + 35.0 * 1.0) / 45.0)

    def test_clearance_uniform(self):
        np.testing.assert_allclose(sonar_clearance(np.full(8, 2.5)), 2.5)

    def test_clearance_shape_checked(self):
        with pytest.raises(ValueError):
            sonar_clearance(np.ones(36))


@pytest.mark.unit
class TestReflex:
    """避障反射测试"""

    def test_turns_to_farthest(self):
        sonar = np.array([0.2, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0])
        cmd = reflex_override(sonar, MotorCommand.move(0.0, 0.5), compass=0.0)
        assert cmd.mode == MotorMode.MOVE
        assert cmd.direction == pytest.approx(180.0)
        assert cmd.speed == 0.5

    def test_relative_to_compass(self):
        sonar = np.array([0.1, 5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        cmd = reflex_override(sonar, MotorCommand.move(0.0), compass=30.0)
        assert cmd.direction == pytest.approx(75.0)

    def test_clear_path_unchanged(self):
        cmd = MotorCommand.move(45.0)
        assert reflex_override(np.full(8, 0.3), cmd, compass=0.0) is cmd

    def test_only_moves_overridden(self):
        cmd = MotorCommand(mode=MotorMode.RELOAD_E)
        assert reflex_override(np.full(8, 0.1), cmd, compass=0.0) is cmd


# ==================== 世界 ====================


@pytest.mark.unit
class TestWorld:
    """运动学与资源可用性测试"""

    def make_world(self, scene, cfg, pose=None, state=None) -> World:
        return World(scene, cfg, np.random.default_rng(0), pose=pose, state=state)

    def test_idle(self, box_scene, quiet_world_cfg):
        world = self.make_world(box_scene, quiet_world_cfg, Pose(x=2.0, y=2.0, theta=30.0))
        for _ in range(100):
            world.advance(MotorCommand.idle(), DT)
        assert (world.pose.x, world.pose.y, world.pose.theta) == (2.0, 2.0, 30.0)
        assert world.time == pytest.approx(10.0)
        assert world.metabolism.E == pytest.approx(1.0 - 10.0 / 1980.0)

    def test_straight_move(self, box_scene, quiet_world_cfg):
        world = self.make_world(box_scene, quiet_world_cfg, Pose(x=1.0, y=2.0, theta=0.0))
        for _ in range(10):
            world.advance(MotorCommand.move(0.0), DT)
        assert world.pose.x == pytest.approx(1.4)
        assert world.pose.y == pytest.approx(2.0)

    def test_turn_rate_limited(self, box_scene, quiet_world_cfg):
        world = self.make_world(box_scene, quiet_world_cfg, Pose(x=2.0, y=2.0, theta=0.0))
        for _ in range(10):
            world.advance(MotorCommand.move(90.0, speed=0.0), DT)
        assert world.pose.theta == pytest.approx(10.0)
        assert world.pose.x == 2.0

    def test_odometry_reports_last_motion(self, box_scene, quiet_world_cfg):
        world = self.make_world(box_scene, quiet_world_cfg, Pose(x=1.0, y=2.0, theta=0.0))
        world.advance(MotorCommand.move(0.0), DT)
        world.advance(MotorCommand.move(0.0), DT)
        frame = world.sense()
        assert frame.odometry[0] == pytest.approx(0.08)
        assert world.sense().odometry[0] == 0.0

    def test_never_enters_wall(self, box_scene, quiet_world_cfg):
        world = self.make_world(box_scene, quiet_world_cfg, Pose(x=2.0, y=2.0, theta=20.0))
        for _ in range(200):
            world.advance(MotorCommand.move(20.0), DT)
            assert box_scene.min_wall_distance(world.position) >= quiet_world_cfg.radius
        assert world.pose.x > 3.5

    @pytest.mark.parametrize("offset,expected", [(0.69, True), (0.71, False)])
    def test_usable_distance(self, box_doc, quiet_world_cfg, offset, expected):
        scene = Scene(box_doc(size=6.0, resources=[resource(ResourceKind.EP, 2.0 + offset, 3.0, "ep")]))
        world = self.make_world(scene, quiet_world_cfg, Pose(x=2.0, y=3.0))
        assert world.usable(ResourceKind.EP) is expected
        assert world.nearest_usable(ResourceKind.EP) == ("ep" if expected else None)
        assert not world.usable(ResourceKind.E)

    def test_absent_resource_not_usable(self, box_doc, quiet_world_cfg):
        scene = Scene(box_doc(resources=[resource(ResourceKind.EP, 2.3, 2.0, "ep")]))
        scene.hide(["ep"])
        world = self.make_world(scene, quiet_world_cfg, Pose(x=2.0, y=2.0))
        assert not world.usable(ResourceKind.EP)

    def test_reload_at_resource(self, box_doc, quiet_world_cfg):
        scene = Scene(box_doc(resources=[resource(ResourceKind.EP, 2.3, 2.0)]))
        world = self.make_world(scene, quiet_world_cfg, Pose(x=2.0, y=2.0), InternalState(E=1.0, E_P=0.5))
        world.advance(MotorCommand(mode=MotorMode.RELOAD_EP), DT)
        assert world.metabolism.E_P == pytest.approx(0.5 + DT / 30.0)

    def test_start_pose_from_scene(self, box_doc, quiet_world_cfg):
        scene = Scene(box_doc(start={"x": 1.0, "y": 3.0, "theta": 45.0}))
        world = self.make_world(scene, quiet_world_cfg)
        assert (world.pose.x, world.pose.y, world.pose.theta) == (1.0, 3.0, 45.0)
        world.advance(MotorCommand.move(45.0), DT)
        assert scene.doc.start.x == 1.0


# ==================== 代谢 ====================


@pytest.mark.unit
class TestMetabolism:
    """代谢测试"""

    @pytest.fixture
    def cfg(self) -> WorldConfig:
        return WorldConfig()

    def test_drain(self, cfg):
        met = update_metabolism(Metabolism(0.5, 0.5), MotorCommand.idle(), False, False, DT, cfg)
        assert met.E == pytest.approx(0.5 - DT / 1980.0)
        assert met.E_P == 0.5

    def test_reload_potential_energy(self, cfg):
        met = update_metabolism(
            Metabolism(0.5, 0.5), MotorCommand(mode=MotorMode.RELOAD_EP), False, True, DT, cfg
        )
        assert met.E_P == pytest.approx(0.5 + DT / 30.0)

    def test_convert_conserves_total(self, cfg):
        before = Metabolism(0.5, 0.5)
        met = update_metabolism(before, MotorCommand(mode=MotorMode.RELOAD_E), True, False, DT, cfg)
        assert met.E == pytest.approx(0.5 + DT / 30.0 - DT / 1980.0)
        assert met.E + met.E_P == pytest.approx(before.E + before.E_P - DT / 1980.0)

    def test_convert_limited_by_stock(self, cfg):
        met = update_metabolism(Metabolism(0.5, 0.001), MotorCommand(mode=MotorMode.RELOAD_E), True, False, DT, cfg)
        assert met.E_P == 0.0
        assert met.E == pytest.approx(0.501 - DT / 1980.0)

    def test_reload_requires_resource(self, cfg):
        met = update_metabolism(Metabolism(0.5, 0.5), MotorCommand(mode=MotorMode.RELOAD_EP), True, False, DT, cfg)
        assert met.E_P == 0.5

    def test_bounded(self, cfg):
        met = update_metabolism(Metabolism(1.0, 1.0), MotorCommand(mode=MotorMode.RELOAD_EP), False, True, DT, cfg)
        assert met.E_P == 1.0
        assert met.E <= 1.0

    def test_death_after_full_drain(self, cfg):
        met = Metabolism(1.0, 0.0)
        steps = 0
        while not met.dead:
            met = update_metabolism(met, MotorCommand.idle(), False, False, DT, cfg)
            steps += 1
        assert 1979.9 <= steps * DT <= 1980.1
        assert met.E == 0.0

    def test_dead_stays_dead(self, cfg):
        dead = Metabolism(0.0, 0.5, True)
        met = update_metabolism(dead, MotorCommand(mode=MotorMode.RELOAD_E), True, True, DT, cfg)
        assert met.dead
        assert met.E == 0.0
