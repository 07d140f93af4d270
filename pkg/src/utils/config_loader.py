"""
配置文件加载器
支持从YAML文件加载配置，并提供默认值（YAML兼容JSON，JSON配置同样可读）

配置文件结构：
- config.yaml: 全局配置（目录、仿真步长、两条环路、导航、世界参数）
- experiments/{NAME}.yaml: 实验配置（场景、地图、初始状态、显著性变体、试验数等）
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.models.object import (
    InhibitionMode,
    InternalState,
    Nucleus,
    SalienceVariantName,
    StopCondition,
    VentralReference,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)


class ConfigError(ValueError):
    """配置、场景或地图文件错误"""


class MapMismatchError(ConfigError):
    """预建地图与场景不一致"""


# ==================== 神经环路配置 ====================


class TransferParams(BaseModel):
    """分段线性传递函数参数"""

    epsilon: float = 0.0
    m: float = Field(1.0, gt=0, description="斜率")


def default_transfer() -> Dict[Nucleus, TransferParams]:
    """各核团的默认阈值与斜率"""
    table = {
        Nucleus.D1: (0.2, 1.0),
        Nucleus.D2: (0.2, 1.0),
        Nucleus.STN: (-0.25, 1.0),
        Nucleus.GP: (-0.2, 1.0),
        Nucleus.EP: (-0.2, 1.0),
        Nucleus.VL: (-0.8, 0.62),
        Nucleus.TRN: (0.0, 0.5),
        Nucleus.P: (0.0, 1.0),
    }
    return {k: TransferParams(epsilon=e, m=m) for k, (e, m) in table.items()}


class LoopConfig(BaseModel):
    """单条皮层-基底节-丘脑环路配置"""

    n_channels: int = Field(2, ge=2)
    tau: float = Field(0.025, gt=0, description="时间常数（秒）")
    dopamine: float = Field(0.2, ge=0.0, le=1.0, description="多巴胺水平λ")
    inhibition_mode: InhibitionMode = InhibitionMode.UNIFORM
    dt: float = Field(0.005, description="独立运行时的积分步长（秒）")
    transfer: Dict[Nucleus, TransferParams] = Field(default_factory=default_transfer)

    gp_to_ep: float = 0.4
    stn_to_ep: float = 0.8
    stn_to_gp: float = 0.8
    trn_to_vl: float = 0.13
    foreign_stn_to_ep: float = 0.4

    @field_validator("transfer")
    @classmethod
    def fill_transfer(cls, v: Dict[Nucleus, TransferParams]) -> Dict[Nucleus, TransferParams]:
        merged = default_transfer()
        merged.update(v)
        return merged

    @model_validator(mode="after")
    def check_dt(self) -> "LoopConfig":
        if not 0 < self.dt <= self.tau:
            raise ValueError(f"积分步长必须在 (0, τ] 内: dt={self.dt}, τ={self.tau}")
        return self

    @classmethod
    def dorsal(cls, **overrides: Any) -> "LoopConfig":
        """背侧环路：2通道，均匀侧抑制"""
        return cls(**{"n_channels": 2, "inhibition_mode": InhibitionMode.UNIFORM, **overrides})

    @classmethod
    def ventral(cls, **overrides: Any) -> "LoopConfig":
        """腹侧环路：36个方向通道，角度侧抑制"""
        return cls(**{"n_channels": 36, "inhibition_mode": InhibitionMode.ANGULAR, **overrides})


class SimulationConfig(BaseModel):
    """仿真节拍与选择阈值"""

    control_dt: float = Field(0.1, gt=0, description="控制周期（秒）")
    neural_dt: float = Field(0.001, gt=0, description="耦合仿真中的神经积分步长（秒）")
    settle_time: float = Field(3.0, gt=0, description="试验开始前零显著性静息时长（秒）")
    dorsal_threshold_ratio: float = Field(0.15, gt=0, lt=1, description="背侧阈值=比例×静息EP")
    ventral_threshold: float = Field(0.05, gt=0, description="腹侧去抑制阈值（绝对值）")
    ventral_reference: VentralReference = Field(
        VentralReference.MEDIAN, description="腹侧去抑制参考：静息EP，或静息EP与当前EP中位数的较大者"
    )
    exploration_drive: bool = True
    exploration_period_s: float = Field(10.0, gt=0)
    exploration_width_deg: float = Field(30.0, gt=0)
    exploration_amplitude: float = Field(1.6, gt=0, description="探索驱动峰值倍数")
    exploration_gating: bool = Field(True, description="按声呐净空削弱指向近处墙体的探索驱动")

    @model_validator(mode="after")
    def check_substeps(self) -> "SimulationConfig":
        ratio = self.control_dt / self.neural_dt
        if ratio < 1 or abs(ratio - round(ratio)) > 1e-6:
            raise ValueError("控制周期必须是神经积分步长的整数倍")
        return self

    @property
    def substeps(self) -> int:
        return int(round(self.control_dt / self.neural_dt))


# ==================== 行为与导航配置 ====================


class SalienceVariant(BaseModel):
    """显著性变体及可覆盖权重"""

    name: SalienceVariantName = SalienceVariantName.EXP12
    w_plan: float = Field(0.65, ge=0)
    w_taxon_ep: float = Field(0.55, ge=0)


class NavigationConfig(BaseModel):
    """拓扑导航参数"""

    node_spacing: float = Field(0.5, gt=0, description="新建节点的里程距离（米）")
    similarity_new: float = Field(0.85, gt=0, le=1, description="低于该相似度时新建节点")
    min_edge: float = Field(0.1, gt=0, description="按相似度新建节点的最小里程（米）")
    signature_rate: float = Field(0.1, gt=0, le=1, description="签名滑动平均权重")
    odo_sigma: float = Field(0.3, gt=0)
    bearing_sigma: float = Field(30.0, gt=0)
    self_loop: float = Field(0.5, ge=0)
    kappa: float = Field(4.0, ge=0)
    lambda_d: float = Field(2.0, gt=0, description="路径距离衰减常数（米）")
    w_use: float = Field(0.1, ge=0, le=1)
    eta_plus: float = Field(0.5, ge=0, le=1)
    eta_minus: float = Field(0.013, ge=0, description="遗忘速率（1/秒）")
    learn_belief_min: float = Field(0.1, ge=0, le=1)
    d_create: float = Field(0.05, ge=0)
    d_decay: float = Field(0.01, ge=0, description="熟悉区域中迷失度下降速率（1/秒）")
    d_belief: float = Field(0.6, ge=0, le=1)
    expl_radius: float = Field(2.0, gt=0)
    expl_cap: int = Field(3, ge=1)


class WorldConfig(BaseModel):
    """身体、传感器与代谢参数"""

    radius: float = Field(0.15, gt=0)
    v_max: float = Field(0.40, gt=0)
    omega_max: float = Field(10.0, gt=0, description="最大转速（度/秒）")
    sonar_range: float = Field(5.0, gt=0)
    sonar_dir_noise: float = Field(5.0, ge=0)
    sonar_range_noise: float = Field(0.10, ge=0)
    odo_noise: float = Field(0.05, ge=0, lt=1)
    compass_noise: float = Field(10.0, ge=0)
    reflex_distance: float = Field(0.30, gt=0)
    usable_distance: float = Field(0.70, gt=0)
    resource_half_size: float = Field(0.25, gt=0)
    drain_rate: float = Field(1.0 / 1980.0, ge=0)
    reload_rate: float = Field(1.0 / 30.0, ge=0)
    noise: bool = True


class PathsConfig(BaseModel):
    """目录配置"""

    logs: str = "./data/logs"
    output: str = "./data/output"
    maps: str = "./data/maps"


class AppConfig(BaseModel):
    """全局配置（来自config.yaml）"""

    paths: PathsConfig = Field(default_factory=PathsConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    dorsal: LoopConfig = Field(default_factory=LoopConfig.dorsal)
    ventral: LoopConfig = Field(default_factory=LoopConfig.ventral)
    navigation: NavigationConfig = Field(default_factory=NavigationConfig)
    world: WorldConfig = Field(default_factory=WorldConfig)
    workers: int = Field(1, ge=1)


# ==================== 实验配置 ====================


class ExperimentConfig(BaseModel):
    """实验配置（来自experiments/{NAME}.yaml 或 run 子命令的配置文件）"""

    name: str = ""
    scene: str
    map: Optional[str] = Field(None, description="预建地图路径，不存在时按巡游路线建图并缓存")
    initial: InternalState = Field(default_factory=InternalState)
    salience: SalienceVariant = Field(default_factory=SalienceVariant)
    planning: bool = Field(True, description="False时不使用规划与回到熟悉区域向量（条件B）")
    trial_count: Optional[int] = Field(None, ge=1, description="覆盖每个序列的试验次数")
    duration_limit: float = Field(14400.0, gt=0)
    stop_condition: StopCondition = StopCondition.DEATH_OR_TIMEOUT
    seed_base: int = 0
    mapping_absent: List[str] = Field(default_factory=list, description="建图时隐藏的资源")
    trial_absent: List[str] = Field(default_factory=list, description="试验时隐藏的资源")
    reference_time_s: float = Field(0.0, ge=0, description="直达路径参考时长（遗忘时间基线）")
    map_build_limit: float = Field(1800.0, gt=0)
    trace_dir: Optional[str] = None
    workers: Optional[int] = Field(None, ge=1)

    simulation: Optional[SimulationConfig] = None
    dorsal: Optional[LoopConfig] = None
    ventral: Optional[LoopConfig] = None
    navigation: Optional[NavigationConfig] = None
    world: Optional[WorldConfig] = None

    @model_validator(mode="after")
    def check_loops(self) -> "ExperimentConfig":
        if self.dorsal is not None and self.dorsal.n_channels != 2:
            raise ValueError("背侧环路必须为2个通道")
        if self.ventral is not None and self.ventral.n_channels != 36:
            raise ValueError("腹侧环路必须为36个通道")
        return self


# ==================== 配置加载器 ====================


class ConfigLoader:
    """配置加载器类"""

    def __init__(self, config_dir: str = "./config"):
        """
        初始化配置加载器

        Args:
            config_dir: 配置文件目录
        """
        self.config_dir = Path(config_dir)
        self.app_config: Optional[AppConfig] = None

    def load_config(self) -> AppConfig:
        """加载全局配置，缺少config.yaml时使用默认值"""
        if self.app_config:
            return self.app_config

        config_path = self.config_dir / "config.yaml"
        if not config_path.exists():
            logger.info(f"未找到全局配置 {config_path}，使用默认参数")
            self.app_config = AppConfig()
            return self.app_config

        data = read_config_file(config_path)
        try:
            self.app_config = AppConfig(**data)
        except ValidationError as e:
            raise ConfigError(f"全局配置无效 {config_path}: {e}") from e
        return self.app_config

    def load_experiment_config(self, source: Union[str, Path]) -> ExperimentConfig:
        """
        加载实验配置，未给出的仿真/环路/导航/世界参数沿用全局配置

        Args:
            source: 配置文件路径，或 experiments 目录下的实验名

        Returns:
            ExperimentConfig: 补全后的实验配置
        """
        path = Path(source)
        if not path.exists():
            path = self.config_dir / "experiments" / f"{source}.yaml"
        if not path.exists():
            raise FileNotFoundError(f"实验配置文件不存在: {source}")

        data = read_config_file(path)
        try:
            exp = ExperimentConfig(**data)
        except ValidationError as e:
            raise ConfigError(f"实验配置无效 {path}: {e}") from e

        exp.scene = self._resolve(exp.scene, path.parent)
        if exp.map:
            exp.map = self._resolve(exp.map, path.parent)
        if not exp.name:
            exp.name = path.stem

        return self.merge_defaults(exp)

    def merge_defaults(self, exp: ExperimentConfig) -> ExperimentConfig:
        """用全局配置补全实验配置中缺失的部分"""
        app = self.load_config()
        if exp.simulation is None:
            exp.simulation = app.simulation
        if exp.dorsal is None:
            exp.dorsal = app.dorsal
        if exp.ventral is None:
            exp.ventral = app.ventral
        if exp.navigation is None:
            exp.navigation = app.navigation
        if exp.world is None:
            exp.world = app.world
        if exp.workers is None:
            exp.workers = app.workers
        return exp

    @staticmethod
    def _resolve(value: str, base_dir: Path) -> str:
        """相对路径优先按当前目录解析，其次按配置文件所在目录解析"""
        candidate = Path(value)
        if candidate.is_absolute() or candidate.exists():
            return str(candidate)
        alt = base_dir / candidate
        return str(alt) if alt.exists() else str(candidate)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """读取YAML/JSON配置文件为字典"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"配置文件解析失败 {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件顶层必须是映射: {path}")
    return data


# 全局配置加载器实例
_config_loader: Optional[ConfigLoader] = None


def get_config_loader(config_dir: Optional[str] = None) -> ConfigLoader:
    """获取全局配置加载器实例，传入目录时重新创建"""
    global _config_loader
    if _config_loader is None or config_dir is not None:
        _config_loader = ConfigLoader(config_dir or "./config")
    return _config_loader


def get_log_dir(base_dir: str, app_name: str) -> str:
    """获取日志目录

    Args:
        base_dir: 日志基础目录（来自 config.yaml paths.logs）
        app_name: 应用名称

    Returns:
        日志目录路径
    """
    return f"{base_dir}/{app_name}"
