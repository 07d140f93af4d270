"""
日志工具模块
基于loguru实现仿真运行日志

当前日志文件：{app_name}_app.log
错误日志文件：{app_name}_error.log
"""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

_CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan> | "
    "<level>{message}</level>"
)
_FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[name]}:{line} | {message}"

logger.configure(extra={"name": "animat"})


def setup_logger(
    app_name: str,
    log_dir: Optional[str] = "./data/logs",
    log_level: str = "INFO",
    rotation: str = "20 MB",  # 长实验按大小轮转
    retention: str = "10 days",
    compression: str = "zip",
) -> None:
    """
    配置loguru日志系统

    Args:
        app_name: 应用名称，用于日志文件名
        log_dir: 日志目录，为None时只输出到控制台
        log_level: 日志级别
        rotation: 日志轮转设置
        retention: 日志保留时间
        compression: 日志压缩方式
    """
    logger.remove()

    logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=log_level, colorize=True)

    if log_dir is None:
        return

    Path(log_dir).mkdir(parents=True, exist_ok=True)
    logger.add(
        f"{log_dir}/{app_name}_app.log",
        format=_FILE_FORMAT,
        level=log_level,
        rotation=rotation,
        retention=retention,
        compression=compression,
        encoding="utf-8",
        enqueue=False,
    )
    logger.add(
        f"{log_dir}/{app_name}_error.log",
        format=_FILE_FORMAT,
        level="ERROR",
        rotation=rotation,
        retention=retention,
        compression=compression,
        encoding="utf-8",
    )
    logger.info(f"日志系统初始化完成，日志目录: {log_dir}")


def get_logger(name: Optional[str] = None):
    """
    获取logger实例

    Args:
        name: logger名称，一般传入模块的 __name__

    Returns:
        绑定了名称的logger
    """
    if name:
        return logger.bind(name=name)
    return logger


def get_trial_logger(name: str, series: str, trial_index: int):
    """获取绑定了实验序列与试验编号的logger"""
    return logger.bind(name=f"{name}[{series}#{trial_index}]")
