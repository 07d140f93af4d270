"""
实验批量运行与结果汇总
按序列运行全部试验（线程池，按试验序号收集结果），并输出 trials.csv / summary.csv / summary.txt
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.experiments.runner import prepare_map, run_trial
from src.experiments.scenarios import SeriesSpec, build_series
from src.experiments.statistics import fisher_exact, mann_whitney_one_sided, mann_whitney_u
from src.models.object import ExperimentName, ResourceKind, TrialResult
from src.navigation.topo_map import TopoMap
from src.utils.config_loader import ExperimentConfig
from src.utils.logger import get_logger
from src.world.scene import load_scene

logger = get_logger(__name__)

FLOAT_FORMAT = "%.6f"
TRIAL_COLUMNS = [
    "series",
    "trial_index",
    "seed",
    "survival_time",
    "died",
    "choice",
    "time_to_reload",
    "final_E",
    "final_EP",
    "nodes",
]


@dataclass
class ExperimentOutcome:
    """一个实验的全部结果"""

    name: str
    specs: List[SeriesSpec]
    results: List[TrialResult]
    trials: pd.DataFrame
    summary: pd.DataFrame


def _trial_jobs(specs: List[SeriesSpec], seed_base: int) -> List[Tuple[SeriesSpec, int, int]]:
    """(序列, 序列内序号, 种子)，种子 = seed_base + 全局试验序号"""
    jobs = []
    for spec in specs:
        for i in range(spec.trials):
            jobs.append((spec, i, seed_base + len(jobs)))
    return jobs


def run_experiment(
    name: str,
    base: ExperimentConfig,
    out_dir: Optional[str] = None,
    workers: Optional[int] = None,
) -> ExperimentOutcome:
    """
    运行实验的全部序列并汇总

    Args:
        name: 实验名
        base: 补全后的基础实验配置
        out_dir: 输出目录，None时不写文件
        workers: 并行线程数，默认取配置

    Returns:
        ExperimentOutcome
    """
    specs = build_series(name, base)
    jobs = _trial_jobs(specs, base.seed_base)
    logger.info(f"实验 {name} 开始: {len(specs)} 个序列, 共 {len(jobs)} 次试验")

    maps: Dict[str, Optional[TopoMap]] = {}
    for spec in specs:
        maps[spec.label] = prepare_map(spec.exp)

    def trace_path(spec: SeriesSpec, index: int) -> Optional[str]:
        if not spec.exp.trace_dir:
            return None
        label = spec.label.replace("=", "_")
        return str(Path(spec.exp.trace_dir) / f"{name}_{label}_{index:03d}.jsonl")

    def run(job: Tuple[SeriesSpec, int, int]) -> TrialResult:
        spec, index, seed = job
        try:
            return run_trial(
                spec.exp,
                seed,
                trial_index=index,
                series=spec.label,
                topo=maps[spec.label],
                trace_path=trace_path(spec, index),
            )
        except Exception:
            logger.exception(f"试验失败 {spec.label}#{index} seed={seed}")
            raise

    with ThreadPoolExecutor(max_workers=workers or base.workers or 1) as pool:
        futures = [pool.submit(run, job) for job in jobs]
        results = [f.result() for f in futures]

    trials = trials_frame(specs, results)
    summary = summarize(name, specs, results)
    outcome = ExperimentOutcome(name, specs, results, trials, summary)
    if out_dir:
        write_outputs(outcome, out_dir)
    logger.info(f"实验 {name} 完成")
    return outcome


# ==================== 汇总 ====================


def trials_frame(specs: List[SeriesSpec], results: List[TrialResult]) -> pd.DataFrame:
    params = {spec.label: spec.params for spec in specs}
    param_cols: List[str] = []
    for spec in specs:
        param_cols += [k for k in spec.params if k not in param_cols]
    rows = []
    for r in results:
        row = r.model_dump(include=set(TRIAL_COLUMNS))
        row.update({k: params[r.series].get(k) for k in param_cols})
        rows.append(row)
    return pd.DataFrame(rows, columns=TRIAL_COLUMNS + param_cols)


def _by_series(specs: List[SeriesSpec], results: List[TrialResult]) -> Dict[str, List[TrialResult]]:
    grouped: Dict[str, List[TrialResult]] = {spec.label: [] for spec in specs}
    for r in results:
        grouped[r.series].append(r)
    return grouped


def _choice_counts(results: List[TrialResult], choices: List[str]) -> Dict[str, int]:
    counts = {c: sum(1 for r in results if r.choice == c) for c in choices}
    counts["none"] = sum(1 for r in results if r.choice not in choices)
    return counts


def _resource_names(spec: SeriesSpec) -> List[str]:
    """序列场景中E_P资源的名称"""
    scene = load_scene(spec.exp.scene)
    return sorted(r.name for r in scene.resources.values() if r.kind == ResourceKind.EP)


def summarize(name: str, specs: List[SeriesSpec], results: List[TrialResult]) -> pd.DataFrame:
    """按实验类型生成汇总表"""
    grouped = _by_series(specs, results)

    if name == ExperimentName.EXP1.value:
        a = [r.survival_time for r in grouped["A"]]
        b = [r.survival_time for r in grouped["B"]]
        u, p = mann_whitney_u(a, b)
        p_one = mann_whitney_one_sided(a, b)
        rows = []
        for spec in specs:
            times = np.array([r.survival_time for r in grouped[spec.label]])
            rows.append(
                {
                    "condition": spec.label,
                    "median": float(np.median(times)),
                    "range": f"{times.min():.1f}-{times.max():.1f}",
                    "U": u,
                    "p": p,
                    "p_one_sided": p_one,
                }
            )
        return pd.DataFrame(rows)

    if name == ExperimentName.EXP2_FORGET.value:
        spec = specs[0]
        forget = np.array(
            [
                r.time_to_reload - spec.exp.reference_time_s
                for r in grouped[spec.label]
                if r.time_to_reload is not None
            ]
        )
        n_total = len(grouped[spec.label])
        if forget.size == 0:
            return pd.DataFrame([{"n": n_total, "reloaded": 0, "mean": np.nan, "std": np.nan, "max": np.nan}])
        return pd.DataFrame(
            [
                {
                    "n": n_total,
                    "reloaded": int(forget.size),
                    "mean": float(forget.mean()),
                    "std": float(forget.std(ddof=1)) if forget.size > 1 else 0.0,
                    "max": float(forget.max()),
                }
            ]
        )

    rows = []
    for spec in specs:
        row = dict(spec.params)
        row.update(_choice_counts(grouped[spec.label], _resource_names(spec)))
        rows.append(row)
    summary = pd.DataFrame(rows)

    if name == ExperimentName.EXP3_DANGER.value and len(rows) == 2:
        # 2×2 表：行为E_P水平，列为 E_P1 / E_P2
        p = fisher_exact(rows[0]["E_P1"], rows[0]["E_P2"], rows[1]["E_P1"], rows[1]["E_P2"])
        summary["fisher_p"] = p
    return summary


def write_outputs(outcome: ExperimentOutcome, out_dir: str) -> None:
    """写出 trials.csv、summary.csv 与可读的 summary.txt（不含时间戳）"""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outcome.trials.to_csv(out / "trials.csv", index=False, float_format=FLOAT_FORMAT)
    outcome.summary.to_csv(out / "summary.csv", index=False, float_format=FLOAT_FORMAT)
    (out / "summary.txt").write_text(
        f"{outcome.name}\n{outcome.summary.to_string(index=False)}\n", encoding="utf-8"
    )
    logger.info(f"结果已写入 {out}")
