"""
仿真命令行入口

子命令：
- run: 按实验配置运行单次试验
- experiment: 运行整组实验并输出汇总表
- map-build: 建图并保存地图文件
- stats: U检验 / Fisher精确检验
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from pydantic import ValidationError

from src.experiments.acceptance import check_experiment
from src.experiments.battery import run_experiment
from src.experiments.runner import build_map, prepare_map, run_trial
from src.experiments.statistics import fisher_exact, mann_whitney_u
from src.utils.config_loader import ConfigError, ExperimentConfig, get_config_loader, get_log_dir
from src.utils.logger import get_logger, setup_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """解析命令行参数"""
    parser = argparse.ArgumentParser(prog="simulate", description="基底节双环路动物体仿真")
    parser.add_argument("--config-dir", type=str, default="./config", help="配置目录")
    parser.add_argument("--debug", action="store_true", help="启用调试模式（输出详细日志）")
    parser.add_argument("--log-dir", type=str, default=None, help="日志目录，默认取配置 paths.logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="运行单次试验")
    p_run.add_argument("--config", type=str, required=True, help="实验配置文件或实验名")
    p_run.add_argument("--seed", type=int, default=0, help="随机种子")
    p_run.add_argument("--trace", type=str, default=None, help="轨迹JSONL输出路径")

    p_exp = sub.add_parser("experiment", help="运行整组实验")
    p_exp.add_argument("name", type=str, help="实验名")
    p_exp.add_argument("--config", type=str, default=None, help="实验配置文件，默认 experiments/{name}.yaml")
    p_exp.add_argument("--out", type=str, default=None, help="输出目录，默认 paths.output/{name}")
    p_exp.add_argument("--check", action="store_true", help="执行行为验收，未通过时返回3")
    p_exp.add_argument("--trials", type=int, default=None, help="覆盖每个序列的试验次数")
    p_exp.add_argument("--workers", type=int, default=None, help="并行线程数")

    p_map = sub.add_parser("map-build", help="建图")
    p_map.add_argument("--scene", type=str, required=True, help="场景文件")
    p_map.add_argument("--duration", type=float, default=None, help="最长建图时间（秒）")
    p_map.add_argument("--out", type=str, required=True, help="地图输出路径")
    p_map.add_argument("--seed", type=int, default=0, help="随机种子")
    p_map.add_argument("--absent", nargs="*", default=[], help="建图时隐藏的资源名")

    p_stats = sub.add_parser("stats", help="统计检验")
    stats_sub = p_stats.add_subparsers(dest="test", required=True)
    p_u = stats_sub.add_parser("utest", help="Mann-Whitney U检验")
    p_u.add_argument("--x", type=float, nargs="+", required=True, help="第一组样本")
    p_u.add_argument("--y", type=float, nargs="+", required=True, help="第二组样本")
    p_f = stats_sub.add_parser("fisher", help="Fisher精确检验")
    for name in ("a", "b", "c", "d"):
        p_f.add_argument(name, type=int, help=f"2×2表计数 {name}")

    return parser.parse_args(argv)


def cmd_run(args: argparse.Namespace) -> int:
    exp = get_config_loader().load_experiment_config(args.config)
    result = run_trial(exp, args.seed, topo=prepare_map(exp), trace_path=args.trace)
    print(result.model_dump_json(indent=2))
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    loader = get_config_loader()
    exp = loader.load_experiment_config(args.config or args.name)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError(f"试验次数必须 ≥ 1: {args.trials}")
        exp.trial_count = args.trials
    out = args.out or str(Path(loader.load_config().paths.output) / args.name)

    outcome = run_experiment(args.name, exp, out_dir=out, workers=args.workers)
    print(outcome.summary.to_string(index=False))
    if not args.check:
        return EXIT_OK
    failed = [c for c in check_experiment(outcome) if not c.passed]
    for c in failed:
        print(f"FAIL {c.name}: {c.detail}")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_map_build(args: argparse.Namespace) -> int:
    loader = get_config_loader()
    exp = loader.merge_defaults(ExperimentConfig(scene=args.scene, mapping_absent=args.absent))
    topo = build_map(exp, args.seed, duration=args.duration)
    topo.save(args.out)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        if args.test == "utest":
            u, p = mann_whitney_u(args.x, args.y)
            print(json.dumps({"U": u, "p": p}))
        else:
            p = fisher_exact(args.a, args.b, args.c, args.d)
            print(json.dumps({"p": p}))
    except ValueError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_CONFIG
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "experiment": cmd_experiment,
    "map-build": cmd_map_build,
    "stats": cmd_stats,
}


def main(argv: Optional[List[str]] = None) -> int:
    """命令行主函数，返回退出码"""
    args = parse_args(argv)
    loader = get_config_loader(args.config_dir)
    try:
        app = loader.load_config()
    except ConfigError as e:
        setup_logger("simulate", log_dir=None)
        logger.error(f"配置错误: {e}")
        return EXIT_CONFIG

    log_dir = args.log_dir or get_log_dir(app.paths.logs, "simulate")
    setup_logger("simulate", log_dir=log_dir, log_level="DEBUG" if args.debug else "INFO")

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, ValidationError) as e:
        logger.error(f"配置错误: {e}")
        return EXIT_CONFIG


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
