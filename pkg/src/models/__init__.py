"""数据模型包，包含枚举与pydantic数据契约"""

from src.models.object import (
    DorsalAction,
    InternalState,
    MapDocument,
    MotorCommand,
    MotorMode,
    Motivations,
    Nucleus,
    Pose,
    ResourceKind,
    SceneDocument,
    TraceRecord,
    TrialResult,
)

__all__ = [
    "DorsalAction",
    "InternalState",
    "MapDocument",
    "MotorCommand",
    "MotorMode",
    "Motivations",
    "Nucleus",
    "Pose",
    "ResourceKind",
    "SceneDocument",
    "TraceRecord",
    "TrialResult",
]
