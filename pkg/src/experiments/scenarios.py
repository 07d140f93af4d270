"""
实验序列定义
每个实验由若干序列组成，序列在基础实验配置上改变一个条件
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List

from src.models.object import ExperimentName, InternalState
from src.utils.config_loader import ConfigError, ExperimentConfig, SalienceVariant


@dataclass
class SeriesSpec:
    """一组相同条件的试验"""

    label: str
    exp: ExperimentConfig
    trials: int
    params: Dict[str, Any] = field(default_factory=dict)


def _variant(base: ExperimentConfig, label: str, trials: int, params: Dict[str, Any], **update: Any) -> SeriesSpec:
    exp = base.model_copy(update=update, deep=True)
    return SeriesSpec(label=label, exp=exp, trials=base.trial_count or trials, params=params)


def exp1_series(base: ExperimentConfig) -> List[SeriesSpec]:
    """条件A使用拓扑导航规划，条件B只有趋向导航"""
    return [
        _variant(base, "A", 10, {"condition": "A"}, planning=True),
        _variant(base, "B", 10, {"condition": "B"}, planning=False),
    ]


def exp2_new_series(base: ExperimentConfig) -> List[SeriesSpec]:
    """新出现资源：规划权重 0.65 / 0.55 / 0.45"""
    specs = []
    for w_plan in (0.65, 0.55, 0.45):
        salience = SalienceVariant(name=base.salience.name, w_plan=w_plan, w_taxon_ep=0.55)
        specs.append(
            _variant(
                base,
                f"w_plan={w_plan:.2f}",
                15,
                {"w_plan": w_plan, "w_taxon": 0.55},
                salience=salience,
            )
        )
    return specs


def single_series(trials: int) -> Callable[[ExperimentConfig], List[SeriesSpec]]:
    def build(base: ExperimentConfig) -> List[SeriesSpec]:
        return [_variant(base, base.name, trials, {})]

    return build


def exp3_danger_series(base: ExperimentConfig) -> List[SeriesSpec]:
    """危险区域：中度（0.5）与重度（0.1）的E_P缺乏"""
    specs = []
    for ep in (0.1, 0.5):
        initial = InternalState(E=base.initial.E, E_P=ep, F=base.initial.F)
        specs.append(
            _variant(base, f"E_P={ep:.1f}", 20, {"F": base.initial.F, "E_P": ep}, initial=initial)
        )
    return specs


def tmaze_scene(base_scene: str, ratio: float) -> str:
    return str(Path(base_scene).with_name(f"tmaze_r{ratio:g}.json"))


def exp3_tmaze_series(base: ExperimentConfig) -> List[SeriesSpec]:
    """T迷宫：右臂与左臂长度比 1 / 1.5 / 2，每种比例使用各自的场景与地图"""
    specs = []
    for ratio in (1.0, 1.5, 2.0):
        scene = tmaze_scene(base.scene, ratio)
        update: Dict[str, Any] = {"scene": scene}
        if base.map:
            update["map"] = str(Path(base.map).with_name(f"{Path(scene).stem}.json"))
        specs.append(_variant(base, f"ratio={ratio:g}", 15, {"ratio": ratio}, **update))
    return specs


SERIES_BUILDERS: Dict[str, Callable[[ExperimentConfig], List[SeriesSpec]]] = {
    ExperimentName.EXP1.value: exp1_series,
    ExperimentName.EXP2_NEW.value: exp2_new_series,
    ExperimentName.EXP2_CONTROL.value: single_series(10),
    ExperimentName.EXP2_FORGET.value: single_series(15),
    ExperimentName.EXP3_DANGER.value: exp3_danger_series,
    ExperimentName.EXP3_CONTROL.value: single_series(10),
    ExperimentName.EXP3_TMAZE.value: exp3_tmaze_series,
}


def build_series(name: str, base: ExperimentConfig) -> List[SeriesSpec]:
    """
    展开实验的全部序列

    Raises:
        ConfigError: 未知实验名
    """
    builder = SERIES_BUILDERS.get(name)
    if builder is None:
        raise ConfigError(f"未知实验: {name}，可选 {', '.join(SERIES_BUILDERS)}")
    return builder(base)
