"""测试数据模型

场景、地图、指令与试验结果模型的单元测试
"""
import pytest
from pydantic import ValidationError

from src.models.object import (
    RESOURCE_GRAY,
    DorsalAction,
    EdgeRecord,
    ExperimentName,
    MapDocument,
    MotorCommand,
    MotorMode,
    NodeRecord,
    Nucleus,
    Pose,
    ResourceKind,
    SceneDocument,
    SegmentSpec,
    TraceRecord,
    TrialResult,
)


@pytest.mark.unit
class TestEnums:
    """枚举类型测试"""

    def test_resource_kind(self):
        assert ResourceKind.EP == "E_P"
        assert ResourceKind("DA") is ResourceKind.DA
        assert len(ResourceKind) == 3

    def test_nucleus_order(self):
        assert [n.value for n in Nucleus] == ["D1", "D2", "STN", "GP", "EP", "VL", "TRN", "P"]

    def test_dorsal_action_order(self):
        assert list(DorsalAction) == [DorsalAction.RELOAD_E, DorsalAction.RELOAD_EP]

    def test_experiment_names(self):
        assert {e.value for e in ExperimentName} == {
            "exp1",
            "exp2-new",
            "exp2-control",
            "exp2-forget",
            "exp3-danger",
            "exp3-control",
            "exp3-tmaze",
        }

    def test_resource_gray_distinct(self):
        assert RESOURCE_GRAY[ResourceKind.EP] == 127
        assert RESOURCE_GRAY[ResourceKind.E] == 255
        assert RESOURCE_GRAY[ResourceKind.DA] == 31


@pytest.mark.unit
class TestMotorCommand:
    """运动指令测试"""

    def test_idle(self):
        cmd = MotorCommand.idle()
        assert cmd.mode == MotorMode.IDLE
        assert cmd.direction is None

    def test_move_wraps_direction(self):
        assert MotorCommand.move(-90.0).direction == pytest.approx(270.0)

    def test_move_requires_direction(self):
        with pytest.raises(ValidationError):
            MotorCommand(mode=MotorMode.MOVE)

    def test_speed_range(self):
        with pytest.raises(ValidationError):
            MotorCommand.move(0.0, speed=1.5)

    def test_pose_theta_normalised(self):
        assert Pose(theta=-45.0).theta == pytest.approx(315.0)


@pytest.mark.unit
class TestSceneDocument:
    """场景文档测试"""

    def base(self, **fields) -> dict:
        data = {
            "bounds": [0, 0, 2, 2],
            "segments": [{"x1": 0, "y1": 0, "x2": 2, "y2": 0, "gray": 100}],
        }
        data.update(fields)
        return data

    def test_default_resource_names(self):
        doc = SceneDocument(
            **self.base(resources=[{"kind": "E", "cx": 1, "cy": 1}, {"kind": "E_P", "cx": 1, "cy": 0.5}])
        )
        assert [r.name for r in doc.resources] == ["E0", "EP1"]

    def test_zero_length_segment(self):
        with pytest.raises(ValidationError):
            SegmentSpec(x1=1, y1=1, x2=1, y2=1, gray=10)

    def test_gray_range(self):
        with pytest.raises(ValidationError):
            SegmentSpec(x1=0, y1=0, x2=1, y2=1, gray=300)

    def test_bad_bounds(self):
        with pytest.raises(ValidationError):
            SceneDocument(**self.base(bounds=[0, 0, -1, 2]))

    def test_bad_tour_point(self):
        with pytest.raises(ValidationError):
            SceneDocument(**self.base(tour=[[1.0, 1.0], [2.0]]))


@pytest.mark.unit
class TestMapDocument:
    """地图文档测试"""

    def test_edge_alias(self):
        edge = EdgeRecord.model_validate({"from": 0, "to": 1, "dist_m": 0.5, "bearing_deg": 90})
        assert edge.from_ == 0
        assert edge.model_dump(by_alias=True)["from"] == 0

    def test_edge_length_positive(self):
        with pytest.raises(ValidationError):
            EdgeRecord(from_=0, to=1, dist_m=0.0, bearing_deg=0.0)

    def test_signature_lengths(self):
        with pytest.raises(ValidationError):
            NodeRecord(id=0, gray=[0.0] * 35, sonar=[0.0] * 8)

    def test_json_round_trip(self):
        doc = MapDocument(
            scene="exp2",
            nodes=[NodeRecord(id=0, gray=[1.0] * 36, sonar=[2.0] * 8, resource_w={"EP": 0.4})],
        )
        loaded = MapDocument.model_validate_json(doc.model_dump_json(by_alias=True))
        assert loaded == doc


@pytest.mark.unit
class TestResults:
    """试验输出模型测试"""

    def test_trial_result_defaults(self):
        result = TrialResult(series="exp1", trial_index=2, seed=1002, survival_time=3600.0)
        assert result.choice is None
        assert not result.died

    def test_trace_record(self):
        record = TraceRecord(t=0.1, x=1, y=2, theta=90, E=1, E_P=0.5, D=0, action=MotorMode.MOVE, direction=90.0)
        assert record.model_dump(mode="json")["action"] == "move"
        assert record.dorsal is None
