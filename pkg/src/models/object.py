"""
抽象数据模型层
场景、地图、试验结果等跨模块数据的契约，序列化统一走pydantic
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# ==================== 枚举定义 ====================


class ResourceKind(str, Enum):
    """资源类型"""

    E = "E"  # 势能资源
    EP = "E_P"  # 潜在能资源
    DA = "DA"  # 危险区域


class DorsalAction(str, Enum):
    """背侧环路动作（通道顺序即通道索引）"""

    RELOAD_E = "reload_E"
    RELOAD_EP = "reload_EP"


class MotorMode(str, Enum):
    """运动指令类型"""

    MOVE = "move"
    RELOAD_E = "reload_E"
    RELOAD_EP = "reload_EP"
    IDLE = "idle"


class Nucleus(str, Enum):
    """GPR模型核团，顺序即状态矩阵的行序"""

    D1 = "D1"
    D2 = "D2"
    STN = "STN"
    GP = "GP"
    EP = "EP"
    VL = "VL"
    TRN = "TRN"
    P = "P"


class InhibitionMode(str, Enum):
    """纹状体侧抑制方式"""

    UNIFORM = "uniform"
    ANGULAR = "angular"
    ANGULAR_LITERAL = "angular_literal"


class VentralReference(str, Enum):
    """腹侧去抑制的参考水平"""

    TONIC = "tonic"  # 静息EP输出
    MEDIAN = "median"  # 静息EP与当前EP中位数的较大者


class SalienceVariantName(str, Enum):
    """显著性计算变体"""

    EXP12 = "exp12"
    EXP31 = "exp31"
    EXP32 = "exp32"


class StopCondition(str, Enum):
    """试验终止条件"""

    FIRST_RELOAD_EP = "first_reload_EP"
    DEATH_OR_TIMEOUT = "death_or_timeout"


class ExperimentName(str, Enum):
    """实验组名称"""

    EXP1 = "exp1"
    EXP2_NEW = "exp2-new"
    EXP2_CONTROL = "exp2-control"
    EXP2_FORGET = "exp2-forget"
    EXP3_DANGER = "exp3-danger"
    EXP3_CONTROL = "exp3-control"
    EXP3_TMAZE = "exp3-tmaze"


# ==================== 基础数据 ====================


class Pose(BaseModel):
    """位姿（米、度，0°为+x方向，逆时针为正）"""

    x: float = 0.0
    y: float = 0.0
    theta: float = Field(0.0, description="朝向，单位度")

    @field_validator("theta")
    @classmethod
    def normalize_theta(cls, v: float) -> float:
        return v % 360.0


class MotorCommand(BaseModel):
    """运动指令"""

    mode: MotorMode = MotorMode.IDLE
    direction: Optional[float] = Field(None, description="move模式下的目标方向（度）")
    speed: float = Field(1.0, ge=0.0, le=1.0, description="速度比例")

    @model_validator(mode="after")
    def check_direction(self) -> "MotorCommand":
        if self.mode == MotorMode.MOVE and self.direction is None:
            raise ValueError("move指令必须给出方向")
        return self

    @classmethod
    def idle(cls) -> "MotorCommand":
        return cls(mode=MotorMode.IDLE)

    @classmethod
    def move(cls, direction: float, speed: float = 1.0) -> "MotorCommand":
        return cls(mode=MotorMode.MOVE, direction=direction % 360.0, speed=speed)


class InternalState(BaseModel):
    """内部变量：势能E、潜在能E_P、恐惧F"""

    E: float = Field(1.0, ge=0.0, le=1.0)
    E_P: float = Field(1.0, ge=0.0, le=1.0)
    F: float = Field(0.0, ge=0.0, le=1.0)


class Motivations(BaseModel):
    """动机"""

    m_E: float = 0.0
    m_EP: float = 0.0
    m_DA: float = 0.0
    m_BKA: float = 0.0


# ==================== 场景文档 ====================


class SegmentSpec(BaseModel):
    """墙体线段"""

    x1: float
    y1: float
    x2: float
    y2: float
    gray: int = Field(..., ge=0, le=255, description="灰度值")

    @model_validator(mode="after")
    def check_length(self) -> "SegmentSpec":
        if self.x1 == self.x2 and self.y1 == self.y2:
            raise ValueError("墙体线段长度不能为0")
        return self


class ResourceSpec(BaseModel):
    """资源方块（0.5m×0.5m，中心坐标cx/cy）"""

    name: str = ""
    kind: ResourceKind
    cx: float
    cy: float
    present: bool = True


class SceneDocument(BaseModel):
    """场景文件"""

    name: str = ""
    bounds: List[float] = Field(..., min_length=4, max_length=4, description="[xmin, ymin, xmax, ymax]")
    segments: List[SegmentSpec] = Field(default_factory=list)
    resources: List[ResourceSpec] = Field(default_factory=list)
    start: Pose = Field(default_factory=Pose)
    tour: List[List[float]] = Field(default_factory=list, description="建图巡游路点 [[x, y], ...]")

    @field_validator("tour")
    @classmethod
    def check_tour(cls, v: List[List[float]]) -> List[List[float]]:
        for point in v:
            if len(point) != 2:
                raise ValueError(f"巡游路点格式错误: {point}")
        return v

    @model_validator(mode="after")
    def check_resources(self) -> "SceneDocument":
        for i, res in enumerate(self.resources):
            if not res.name:
                res.name = f"{res.kind.name}{i}"
        names = [r.name for r in self.resources]
        if len(names) != len(set(names)):
            raise ValueError("资源名称重复")
        xmin, ymin, xmax, ymax = self.bounds
        if xmax <= xmin or ymax <= ymin:
            raise ValueError(f"场景边界无效: {self.bounds}")
        return self


# ==================== 拓扑地图文档 ====================


class NodeRecord(BaseModel):
    """地图节点，resource_w的键为 E / EP / DA"""

    id: int
    gray: List[float] = Field(..., min_length=36, max_length=36)
    sonar: List[float] = Field(..., min_length=8, max_length=8)
    resource_w: Dict[str, float] = Field(default_factory=dict)
    visits: int = 1


class EdgeRecord(BaseModel):
    """地图边（无向，bearing_deg为from→to方向）"""

    model_config = ConfigDict(populate_by_name=True)

    from_: int = Field(..., alias="from")
    to: int
    dist_m: float = Field(..., gt=0)
    bearing_deg: float


class MapDocument(BaseModel):
    """拓扑地图文件"""

    scene: str = ""
    nodes: List[NodeRecord] = Field(default_factory=list)
    edges: List[EdgeRecord] = Field(default_factory=list)


# ==================== 试验输出 ====================


class TrialResult(BaseModel):
    """单次试验结果"""

    series: str = ""
    trial_index: int = 0
    seed: int = 0
    survival_time: float = Field(0.0, description="存活/仿真时长（秒）")
    died: bool = False
    choice: Optional[str] = Field(None, description="首次补充E_P的资源名")
    time_to_reload: Optional[float] = None
    final_E: float = 0.0
    final_EP: float = 0.0
    nodes: int = Field(0, description="试验结束时地图节点数")
    trace_path: Optional[str] = None


class TraceRecord(BaseModel):
    """轨迹记录（JSONL一行）"""

    t: float
    x: float
    y: float
    theta: float
    E: float
    E_P: float
    D: float
    action: MotorMode
    dorsal: Optional[DorsalAction] = Field(None, description="背侧环路选中的动作")
    direction: Optional[float] = Field(None, description="腹侧环路选中的方向")
    node: Optional[int] = None
    entropy: float = Field(0.0, description="定位置信分布的熵")


# 资源方块颜色（灰度）
RESOURCE_GRAY: Dict[ResourceKind, int] = {
    ResourceKind.EP: 127,
    ResourceKind.E: 255,
    ResourceKind.DA: 31,
}
