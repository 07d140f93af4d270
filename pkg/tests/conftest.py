import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest

from src.behavior.percepts import Percepts
from src.models.object import ResourceKind, SceneDocument
from src.navigation.topo_map import Signature
from src.utils.config_loader import (
    ConfigLoader,
    ExperimentConfig,
    NavigationConfig,
    WorldConfig,
)
from src.world.scene import Scene


# ==================== 路径 ====================


@pytest.fixture(scope="session")
def config_dir() -> Path:
    """仓库自带的配置目录"""
    return project_root / "config"


@pytest.fixture(scope="session")
def scenes_dir(config_dir) -> Path:
    return config_dir / "scenes"


# ==================== 配置 ====================


@pytest.fixture
def nav_cfg() -> NavigationConfig:
    return NavigationConfig()


@pytest.fixture
def quiet_world_cfg() -> WorldConfig:
    """关闭传感器噪声的世界配置"""
    return WorldConfig(noise=False)


@pytest.fixture
def default_loader(tmp_path) -> ConfigLoader:
    """没有 config.yaml 的加载器，全部使用默认参数"""
    return ConfigLoader(str(tmp_path / "no_config"))


@pytest.fixture
def make_experiment(default_loader) -> Callable[..., ExperimentConfig]:
    """按默认全局参数补全的实验配置工厂"""

    def factory(scene: str, **fields) -> ExperimentConfig:
        return default_loader.merge_defaults(ExperimentConfig(scene=str(scene), **fields))

    return factory


# ==================== 场景 ====================


def _box_document(
    size: float = 4.0,
    gray: int = 200,
    resources: Optional[List[Dict]] = None,
    start: Optional[Dict] = None,
    name: str = "box",
) -> SceneDocument:
    """边长为 size 的单色方形场景"""
    corners = [(0.0, 0.0), (size, 0.0), (size, size), (0.0, size)]
    segments = [
        {"x1": a[0], "y1": a[1], "x2": b[0], "y2": b[1], "gray": gray}
        for a, b in zip(corners, corners[1:] + corners[:1])
    ]
    return SceneDocument(
        name=name,
        bounds=[0.0, 0.0, size, size],
        segments=segments,
        resources=resources or [],
        start=start or {"x": size / 2, "y": size / 2, "theta": 0.0},
    )


@pytest.fixture
def box_doc() -> Callable[..., SceneDocument]:
    """方形场景文档工厂"""
    return _box_document


@pytest.fixture
def box_scene() -> Scene:
    """4m×4m 灰度200方形场景，无资源"""
    return Scene(_box_document())


@pytest.fixture
def write_scene(tmp_path) -> Callable[..., Path]:
    """把场景文档写成临时JSON文件"""

    def write(doc: SceneDocument, filename: str = "scene.json") -> Path:
        path = tmp_path / filename
        path.write_text(doc.model_dump_json(indent=1), encoding="utf-8")
        return path

    return write


# ==================== 感知与签名 ====================


@pytest.fixture
def empty_percepts() -> Percepts:
    return Percepts.empty()


@pytest.fixture
def percepts_of() -> Callable[..., Percepts]:
    """某类资源在正前方（通道0）的感知"""

    def make(kind: ResourceKind, m_prox: float = 1.0) -> Percepts:
        p = Percepts.empty()
        p.prox[kind][0] = m_prox
        p.m_prox[kind] = m_prox
        p.usable[kind] = m_prox >= 1.0
        return p

    return make


@pytest.fixture
def flat_signature() -> Callable[..., Signature]:
    """各方向相同的签名"""

    def make(gray: float = 100.0, sonar: float = 2.0) -> Signature:
        return Signature(gray=np.full(36, gray), sonar=np.full(8, sonar))

    return make
