"""
行为验收
对实验汇总表检查预期的选择模式与统计显著性；试验次数被覆盖时按比例换算阈值
"""

from dataclasses import dataclass
from typing import Callable, Dict, List

import pandas as pd

from src.experiments.battery import ExperimentOutcome
from src.models.object import ExperimentName
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class CheckResult:
    """单项验收结果"""

    name: str
    passed: bool
    detail: str


def _row(summary: pd.DataFrame, column: str, value: float) -> pd.Series:
    matched = summary[(summary[column] - value).abs() < 1e-9]
    if matched.empty:
        raise ValueError(f"汇总表中没有 {column}={value} 的行")
    return matched.iloc[0]


def _total(row: pd.Series, choices: List[str]) -> int:
    return int(sum(int(row[c]) for c in choices + ["none"]))


def _fraction_at_least(count: int, total: int, num: int, den: int) -> bool:
    """count/total ≥ num/den"""
    return total > 0 and count * den >= num * total


def _fraction_at_most(count: int, total: int, num: int, den: int) -> bool:
    return count * den <= num * total


def check_exp1(outcome: ExperimentOutcome) -> List[CheckResult]:
    s = outcome.summary.set_index("condition")
    med_a, med_b = float(s.loc["A", "median"]), float(s.loc["B", "median"])
    p_one = float(s.loc["A", "p_one_sided"])
    return [
        CheckResult("exp1 中位数 A > B", med_a > med_b, f"A={med_a:.1f}, B={med_b:.1f}"),
        CheckResult("exp1 单侧U检验 p < 0.05", p_one < 0.05, f"p={p_one:.4f}"),
        CheckResult("exp1 中位数 A ≥ 2B", med_a >= 2 * med_b, f"A/B={med_a / max(med_b, 1e-9):.2f}"),
    ]


def check_exp2_new(outcome: ExperimentOutcome) -> List[CheckResult]:
    s = outcome.summary
    choices = ["E_P1", "E_P2"]
    high, mid, low = _row(s, "w_plan", 0.65), _row(s, "w_plan", 0.55), _row(s, "w_plan", 0.45)
    n_high, n_mid, n_low = _total(high, choices), _total(mid, choices), _total(low, choices)
    return [
        CheckResult(
            "exp2-new W_plan=0.65 多数选择 E_P1",
            _fraction_at_least(int(high["E_P1"]), n_high, 10, 15),
            f"E_P1={high['E_P1']}/{n_high}",
        ),
        CheckResult(
            "exp2-new W_plan=0.45 多数选择 E_P2",
            _fraction_at_least(int(low["E_P2"]), n_low, 10, 15),
            f"E_P2={low['E_P2']}/{n_low}",
        ),
        CheckResult(
            "exp2-new W_plan=0.55 无明显偏好",
            _fraction_at_most(max(int(mid["E_P1"]), int(mid["E_P2"])), n_mid, 12, 15),
            f"E_P1={mid['E_P1']}, E_P2={mid['E_P2']}/{n_mid}",
        ),
    ]


def check_exp2_forget(outcome: ExperimentOutcome) -> List[CheckResult]:
    row = outcome.summary.iloc[0]
    mean, peak = float(row["mean"]), float(row["max"])
    return [
        CheckResult("exp2-forget 平均遗忘时间 ∈ [60, 360]s", 60.0 <= mean <= 360.0, f"mean={mean:.1f}s"),
        CheckResult("exp2-forget 最大遗忘时间 ≤ 600s", peak <= 600.0, f"max={peak:.1f}s"),
    ]


def check_exp3_danger(outcome: ExperimentOutcome) -> List[CheckResult]:
    s = outcome.summary
    choices = ["E_P1", "E_P2"]
    mild, strong = _row(s, "E_P", 0.5), _row(s, "E_P", 0.1)
    n_mild, n_strong = _total(mild, choices), _total(strong, choices)
    p = float(s["fisher_p"].iloc[0])
    return [
        CheckResult(
            "exp3-danger E_P=0.5 多数选择 E_P2",
            _fraction_at_least(int(mild["E_P2"]), n_mild, 14, 20),
            f"E_P2={mild['E_P2']}/{n_mild}",
        ),
        CheckResult(
            "exp3-danger E_P=0.1 多数选择 E_P1",
            _fraction_at_least(int(strong["E_P1"]), n_strong, 11, 20),
            f"E_P1={strong['E_P1']}/{n_strong}",
        ),
        CheckResult("exp3-danger Fisher p < 0.01", p < 0.01, f"p={p:.4g}"),
    ]


def check_exp3_tmaze(outcome: ExperimentOutcome) -> List[CheckResult]:
    s = outcome.summary
    choices = ["left", "right"]
    r1, r15, r2 = _row(s, "ratio", 1.0), _row(s, "ratio", 1.5), _row(s, "ratio", 2.0)
    n1, n15, n2 = _total(r1, choices), _total(r15, choices), _total(r2, choices)
    right2 = int(r2["right"])
    return [
        CheckResult("T迷宫 比例1 多数选右", _fraction_at_least(int(r1["right"]), n1, 10, 15), f"right={r1['right']}/{n1}"),
        CheckResult("T迷宫 比例1.5 多数选右", _fraction_at_least(int(r15["right"]), n15, 9, 15), f"right={r15['right']}/{n15}"),
        CheckResult(
            "T迷宫 比例2 左右接近",
            _fraction_at_least(right2, n2, 5, 15) and _fraction_at_most(right2, n2, 10, 15),
            f"right={right2}/{n2}",
        ),
    ]


def _check_control(label: str) -> Callable[[ExperimentOutcome], List[CheckResult]]:
    def check(outcome: ExperimentOutcome) -> List[CheckResult]:
        row = outcome.summary.iloc[0]
        total = _total(row, ["E_P1", "E_P2"])
        return [
            CheckResult(
                f"{label} 多数选择 E_P1",
                _fraction_at_least(int(row["E_P1"]), total, 8, 10),
                f"E_P1={row['E_P1']}/{total}",
            )
        ]

    return check


CHECKS: Dict[str, Callable[[ExperimentOutcome], List[CheckResult]]] = {
    ExperimentName.EXP1.value: check_exp1,
    ExperimentName.EXP2_NEW.value: check_exp2_new,
    ExperimentName.EXP2_CONTROL.value: _check_control("exp2-control"),
    ExperimentName.EXP2_FORGET.value: check_exp2_forget,
    ExperimentName.EXP3_DANGER.value: check_exp3_danger,
    ExperimentName.EXP3_CONTROL.value: _check_control("exp3-control"),
    ExperimentName.EXP3_TMAZE.value: check_exp3_tmaze,
}


def check_experiment(outcome: ExperimentOutcome) -> List[CheckResult]:
    """
    对实验结果执行验收

    Returns:
        各项验收结果，并逐项写日志
    """
    results = CHECKS[outcome.name](outcome)
    for r in results:
        if r.passed:
            logger.info(f"验收通过: {r.name} ({r.detail})")
        else:
            logger.warning(f"验收未通过: {r.name} ({r.detail})")
    return results
