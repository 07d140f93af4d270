"""
GPR基底节环路模型
皮层-基底节-丘脑-皮层环路的漏积分神经网络（显式欧拉积分，同步更新）

状态矩阵的行序与 Nucleus 枚举一致：D1, D2, STN, GP, EP, VL, TRN, P
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from src.models.object import InhibitionMode, Nucleus
from src.utils.config_loader import LoopConfig, TransferParams
from src.utils.logger import get_logger

logger = get_logger(__name__)

NUCLEI = tuple(Nucleus)
ROW = {nucleus: i for i, nucleus in enumerate(NUCLEI)}
D1, D2, STN, GP, EP, VL, TRN, P = range(len(NUCLEI))


def transfer(a: Union[float, np.ndarray], p: TransferParams) -> Union[float, np.ndarray]:
    """
    分段线性传递函数

    a < ε 时输出0，ε ≤ a < ε+1/m 时输出 m(a-ε)，其余输出1

    Args:
        a: 激活值（标量或数组）
        p: 传递参数

    Returns:
        [0, 1] 内的输出
    """
    y = np.clip(p.m * (np.asarray(a, dtype=float) - p.epsilon), 0.0, 1.0)
    if y.ndim == 0:
        return float(y)
    return y


def neuron_step(
    a: Union[float, np.ndarray], I: Union[float, np.ndarray], dt: float, tau: float
) -> Union[float, np.ndarray]:
    """τ da/dt = I − a 的一步显式欧拉积分"""
    if dt <= 0 or dt > tau:
        raise ValueError(f"积分步长越界: dt={dt}, τ={tau}")
    return a + (dt / tau) * (I - a)


@lru_cache(maxsize=32)
def inhibition_weights(n: int, mode: InhibitionMode) -> np.ndarray:
    """
    纹状体侧抑制权重矩阵 w(i, j)，对角线为0

    uniform: 全部为1
    angular: min(|i-j|, n-|i-j|) / (n/2)，相邻方向竞争弱、相反方向竞争强
    angular_literal: (|i-j| mod (n/2)) / (n/2)
    """
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :]).astype(float)
    if mode == InhibitionMode.UNIFORM:
        w = np.ones((n, n))
    elif mode == InhibitionMode.ANGULAR:
        w = np.minimum(dist, n - dist) / (n / 2)
    else:
        w = np.mod(dist, n / 2) / (n / 2)
    np.fill_diagonal(w, 0.0)
    w.setflags(write=False)
    return w


def lateral_inhibition(outputs: np.ndarray, i: int, mode: InhibitionMode, n: int) -> float:
    """通道i受到的侧抑制总量 Σ_{j≠i} w(i,j)·y_j"""
    outputs = np.asarray(outputs, dtype=float)
    if len(outputs) != n:
        raise ValueError(f"输出长度 {len(outputs)} 与通道数 {n} 不一致")
    if not 0 <= i < n:
        raise IndexError(f"通道索引越界: {i}")
    return float(inhibition_weights(n, mode)[i] @ outputs)


@dataclass
class LoopState:
    """一条环路的全部神经元状态，a/y 形状为 (8, n_channels)"""

    a: np.ndarray
    y: np.ndarray
    residual: float = field(default=math.inf)  # 最后一步的 max|Δa|

    @property
    def n_channels(self) -> int:
        return self.a.shape[1]

    def output(self, nucleus: Nucleus) -> np.ndarray:
        return self.y[ROW[nucleus]]

    def activation(self, nucleus: Nucleus) -> np.ndarray:
        return self.a[ROW[nucleus]]

    def copy(self) -> "LoopState":
        return LoopState(a=self.a.copy(), y=self.y.copy(), residual=self.residual)


class GPRLoop:
    """预计算了传递参数与侧抑制矩阵的环路积分器"""

    def __init__(self, cfg: LoopConfig):
        self.cfg = cfg
        self.n = cfg.n_channels
        self.eps = np.array([[cfg.transfer[k].epsilon] for k in NUCLEI])
        self.slope = np.array([[cfg.transfer[k].m] for k in NUCLEI])
        self.weights = inhibition_weights(self.n, cfg.inhibition_mode)

    def outputs(self, a: np.ndarray) -> np.ndarray:
        return np.clip(self.slope * (a - self.eps), 0.0, 1.0)

    def zero_state(self) -> LoopState:
        """所有激活为0的初始状态"""
        a = np.zeros((len(NUCLEI), self.n))
        return LoopState(a=a, y=self.outputs(a))

    def inputs(
        self,
        state: LoopState,
        saliences: np.ndarray,
        foreign_stn_sum: float = 0.0,
        persistence_weight: float = 0.0,
    ) -> np.ndarray:
        """
        由上一步输出计算各核团输入

        Args:
            state: 当前状态
            saliences: 各通道显著性
            foreign_stn_sum: 背侧STN输出之和（腹侧环路的跨环路项，背侧传0）
            persistence_weight: P神经元输出回馈到显著性的权重（闭环静息状态与消融实验）
        """
        s = np.asarray(saliences, dtype=float)
        if s.shape != (self.n,):
            raise ValueError(f"显著性长度 {s.size} 与通道数 {self.n} 不一致")
        if foreign_stn_sum < 0:
            raise ValueError(f"跨环路STN输入不能为负: {foreign_stn_sum}")

        cfg = self.cfg
        y = state.y
        if persistence_weight:
            s = s + persistence_weight * y[P]

        stn_sum = y[STN].sum()
        I = np.empty_like(y)
        I[D1] = (1.0 + cfg.dopamine) * s - self.weights @ y[D1]
        I[D2] = (1.0 - cfg.dopamine) * s - self.weights @ y[D2]
        I[STN] = s - y[GP]
        I[GP] = -y[D2] + cfg.stn_to_gp * stn_sum
        I[EP] = (
            -y[D1]
            - cfg.gp_to_ep * y[GP]
            + cfg.stn_to_ep * stn_sum
            + cfg.foreign_stn_to_ep * foreign_stn_sum
        )
        I[VL] = y[P] - y[EP] - cfg.trn_to_vl * (y[TRN].sum() - y[TRN])
        I[TRN] = y[VL] + y[P]
        I[P] = y[VL]
        return I

    def operator(self) -> Tuple[sparse.csr_matrix, np.ndarray]:
        """
        输入关于输出与显著性的线性形式 I = W·y + B·s（状态按核团行展开为 8n 维）

        跨环路项不在其中，由耦合方补到EP行

        Returns:
            (W: 8n×8n 稀疏矩阵, B: 8n×n 矩阵)
        """
        cfg, n = self.cfg, self.n
        eye = np.eye(n)
        ones = np.ones((n, n))
        blocks: List[List[Optional[np.ndarray]]] = [[None] * len(NUCLEI) for _ in NUCLEI]
        blocks[D1][D1] = -self.weights
        blocks[D2][D2] = -self.weights
        blocks[STN][GP] = -eye
        blocks[GP][D2] = -eye
        blocks[GP][STN] = cfg.stn_to_gp * ones
        blocks[EP][D1] = -eye
        blocks[EP][GP] = -cfg.gp_to_ep * eye
        blocks[EP][STN] = cfg.stn_to_ep * ones
        blocks[VL][P] = eye
        blocks[VL][EP] = -eye
        blocks[VL][TRN] = -cfg.trn_to_vl * (ones - eye)
        blocks[TRN][VL] = eye
        blocks[TRN][P] = eye
        blocks[P][VL] = eye
        # 对角块占位，保证 bmat 能推断每一行块的高度
        for k in range(len(NUCLEI)):
            if blocks[k][k] is None:
                blocks[k][k] = np.zeros((n, n))
        weights = sparse.bmat(
            [[None if b is None else sparse.coo_matrix(b) for b in row] for row in blocks], format="csr"
        )
        weights.eliminate_zeros()

        gain = np.zeros((len(NUCLEI) * n, n))
        gain[D1 * n : (D1 + 1) * n] = (1.0 + cfg.dopamine) * eye
        gain[D2 * n : (D2 + 1) * n] = (1.0 - cfg.dopamine) * eye
        gain[STN * n : (STN + 1) * n] = eye
        return weights, gain

    def step(
        self,
        state: LoopState,
        saliences: np.ndarray,
        foreign_stn_sum: float = 0.0,
        dt: Optional[float] = None,
        persistence_weight: float = 0.0,
    ) -> LoopState:
        """同步更新一步，返回新状态"""
        dt = self.cfg.dt if dt is None else dt
        I = self.inputs(state, saliences, foreign_stn_sum, persistence_weight)
        a = neuron_step(state.a, I, dt, self.cfg.tau)
        return LoopState(a=a, y=self.outputs(a), residual=float(np.abs(a - state.a).max()))


def zero_state(cfg: LoopConfig) -> LoopState:
    return GPRLoop(cfg).zero_state()


def loop_step(
    state: LoopState,
    saliences: np.ndarray,
    cfg: LoopConfig,
    foreign_stn_sum: float = 0.0,
    dt: Optional[float] = None,
    persistence_weight: float = 0.0,
) -> LoopState:
    """环路前进一步"""
    return GPRLoop(cfg).step(state, saliences, foreign_stn_sum, dt, persistence_weight)


def settle(
    state: LoopState,
    saliences: np.ndarray,
    cfg: LoopConfig,
    foreign_stn_sum: float = 0.0,
    max_time: float = 10.0,
    tol: float = 1e-9,
    dt: Optional[float] = None,
    persistence_weight: float = 0.0,
) -> LoopState:
    """
    恒定输入下积分至不动点

    Args:
        state: 起始状态
        saliences: 恒定显著性
        cfg: 环路配置
        foreign_stn_sum: 跨环路STN输入
        max_time: 最长积分时间（秒）
        tol: 单步 max|Δa| 收敛阈值
        dt: 积分步长，默认取 cfg.dt
        persistence_weight: P→显著性回馈权重

    Returns:
        首个满足收敛阈值的状态，或积分到 max_time 的状态（由 residual 判断是否收敛）
    """
    if tol <= 0:
        raise ValueError(f"收敛阈值必须为正: {tol}")
    loop = GPRLoop(cfg)
    dt = cfg.dt if dt is None else dt
    n_steps = int(math.ceil(max_time / dt))
    for _ in range(n_steps):
        state = loop.step(state, saliences, foreign_stn_sum, dt, persistence_weight)
        if state.residual < tol:
            break
    else:
        logger.debug(f"环路在 {max_time}s 内未收敛，残差 {state.residual:.3e}")
    return state
