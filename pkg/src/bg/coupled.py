"""
背侧/腹侧双环路耦合
背侧STN输出之和经跨丘脑底核通路同等地兴奋腹侧每个方向的EP

两条环路的状态拼成一个 8×(2+36) 维向量，每个神经子步只做一次稀疏矩阵乘
"""

from typing import Tuple

import numpy as np
from scipy import sparse

from src.bg.gpr import EP, NUCLEI, STN, GPRLoop, LoopState
from src.bg.selection import (
    SelectionReadout,
    dorsal_select,
    rest_state,
    tonic_output,
    ventral_select,
)
from src.models.object import Nucleus, VentralReference
from src.utils.config_loader import LoopConfig, SimulationConfig
from src.utils.logger import get_logger

logger = get_logger(__name__)


class CoupledLoops:
    """两条环路的联合积分与选择读出"""

    def __init__(
        self,
        dorsal_cfg: LoopConfig,
        ventral_cfg: LoopConfig,
        sim: SimulationConfig,
        persistence: Tuple[float, float] = (0.0, 0.0),
    ):
        """
        初始化双环路，并在零外部显著性下积分到静息状态

        Args:
            dorsal_cfg: 背侧环路配置（2通道）
            ventral_cfg: 腹侧环路配置（36通道）
            sim: 仿真配置（神经步长、阈值、腹侧参考）
            persistence: (背侧, 腹侧) P神经元输出回馈到显著性的权重。
                闭环运行时显著性里含有该回馈，静息状态也按同样的回馈积分
        """
        self.dorsal = GPRLoop(dorsal_cfg)
        self.ventral = GPRLoop(ventral_cfg)
        self.dt = sim.neural_dt
        self.substeps = sim.substeps
        self.reference = sim.ventral_reference
        for cfg in (dorsal_cfg, ventral_cfg):
            if self.dt > cfg.tau:
                raise ValueError(f"神经积分步长大于时间常数: dt={self.dt}, τ={cfg.tau}")

        w_dorsal, w_ventral = persistence
        self.dorsal_state: LoopState = rest_state(
            dorsal_cfg, dt=self.dt, max_time=sim.settle_time, persistence_weight=w_dorsal
        )
        foreign = float(self.dorsal_state.output(Nucleus.STN).sum())
        self.ventral_state: LoopState = rest_state(
            ventral_cfg,
            dt=self.dt,
            foreign_stn_sum=foreign,
            max_time=sim.settle_time,
            persistence_weight=w_ventral,
        )

        self.dorsal_tonic = tonic_output(self.dorsal_state)
        self.ventral_tonic = tonic_output(self.ventral_state)
        self.theta_sel = sim.dorsal_threshold_ratio * self.dorsal_tonic
        self.theta_v = sim.ventral_threshold
        self._build_operator()

        logger.debug(
            f"双环路静息完成 - 背侧静息EP: {self.dorsal_tonic:.4f}, θ_sel: {self.theta_sel:.4f}, "
            f"腹侧静息EP: {self.ventral_tonic:.4f}, θ_v: {self.theta_v}, 跨环路STN: {foreign:.4f}"
        )

    def _build_operator(self) -> None:
        """拼接两条环路的线性算子，并把背侧STN→腹侧EP的跨环路项放到非对角块"""
        w_d, self._gain_d = self.dorsal.operator()
        w_v, self._gain_v = self.ventral.operator()
        nd, nv = self.dorsal.n, self.ventral.n

        rows = np.repeat(np.arange(EP * nv, (EP + 1) * nv), nd)
        cols = np.tile(np.arange(STN * nd, (STN + 1) * nd), nv)
        values = np.full(rows.size, self.ventral.cfg.foreign_stn_to_ep)
        cross = sparse.coo_matrix((values, (rows, cols)), shape=(len(NUCLEI) * nv, len(NUCLEI) * nd))
        self._weights = sparse.bmat([[w_d, None], [cross, w_v]], format="csr")

        self._split = len(NUCLEI) * nd
        self._rate = np.concatenate(
            [
                np.full(self._split, self.dt / self.dorsal.cfg.tau),
                np.full(len(NUCLEI) * nv, self.dt / self.ventral.cfg.tau),
            ]
        )
        self._eps = np.concatenate(
            [np.repeat(self.dorsal.eps[:, 0], nd), np.repeat(self.ventral.eps[:, 0], nv)]
        )
        self._slope = np.concatenate(
            [np.repeat(self.dorsal.slope[:, 0], nd), np.repeat(self.ventral.slope[:, 0], nv)]
        )

    @property
    def dorsal_persistence(self) -> np.ndarray:
        """背侧P神经元输出"""
        return self.dorsal_state.output(Nucleus.P).copy()

    @property
    def ventral_persistence(self) -> np.ndarray:
        """腹侧P神经元输出"""
        return self.ventral_state.output(Nucleus.P).copy()

    def step(self, dorsal_saliences: np.ndarray, ventral_saliences: np.ndarray) -> SelectionReadout:
        """
        以恒定显著性积分一个控制周期，返回周期末的选择结果

        Args:
            dorsal_saliences: [S_E, S_EP]
            ventral_saliences: 36维方向显著性
        """
        s_d = np.asarray(dorsal_saliences, dtype=float)
        s_v = np.asarray(ventral_saliences, dtype=float)
        if s_d.shape != (self.dorsal.n,) or s_v.shape != (self.ventral.n,):
            raise ValueError(f"显著性维度错误: 背侧 {s_d.shape}, 腹侧 {s_v.shape}")

        drive = np.concatenate([self._gain_d @ s_d, self._gain_v @ s_v])
        a = np.concatenate([self.dorsal_state.a.ravel(), self.ventral_state.a.ravel()])
        y = np.concatenate([self.dorsal_state.y.ravel(), self.ventral_state.y.ravel()])
        delta = np.zeros_like(a)
        for _ in range(self.substeps):
            delta = self._rate * (self._weights @ y + drive - a)
            a = a + delta
            y = np.clip(self._slope * (a - self._eps), 0.0, 1.0)

        k = self._split
        self.dorsal_state = LoopState(
            a=a[:k].reshape(len(NUCLEI), -1),
            y=y[:k].reshape(len(NUCLEI), -1),
            residual=float(np.abs(delta[:k]).max()),
        )
        self.ventral_state = LoopState(
            a=a[k:].reshape(len(NUCLEI), -1),
            y=y[k:].reshape(len(NUCLEI), -1),
            residual=float(np.abs(delta[k:]).max()),
        )
        return self.readout()

    def ventral_reference(self) -> float:
        """腹侧去抑制的参考水平"""
        if self.reference == VentralReference.MEDIAN:
            # 所有方向共同抬高的抑制不构成方向偏好
            return max(self.ventral_tonic, float(np.median(self.ventral_state.output(Nucleus.EP))))
        return self.ventral_tonic

    def readout(self) -> SelectionReadout:
        return SelectionReadout(
            dorsal=dorsal_select(self.dorsal_state.output(Nucleus.EP), self.theta_sel),
            ventral=ventral_select(
                self.ventral_state.output(Nucleus.EP), self.ventral_reference(), self.theta_v
            ),
        )
