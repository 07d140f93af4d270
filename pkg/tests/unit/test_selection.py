"""
选择读出单元测试
"""

import numpy as np
import pytest

from src.bg.selection import dorsal_select, rest_state, tonic_output, ventral_select
from src.models.object import Nucleus
from src.utils.config_loader import LoopConfig
from src.utils.helpers import angle_diff

TONIC = 0.5
THETA_V = 0.05


def ventral_ep(disinhibition: dict) -> np.ndarray:
    """按给定通道的去抑制幅度构造腹侧EP输出"""
    ep = np.full(36, TONIC)
    for channel, d in disinhibition.items():
        ep[channel] = TONIC - d
    return ep


@pytest.mark.unit
class TestDorsalSelect:
    """背侧赢者通吃测试"""

    def test_unique_channel_below_threshold(self):
        assert dorsal_select(np.array([0.0, 0.6]), 0.1) == 0

    def test_nothing_disinhibited(self):
        assert dorsal_select(np.array([0.5, 0.6]), 0.1) is None

    def test_tie_breaks_to_lowest_index(self):
        assert dorsal_select(np.array([0.05, 0.05]), 0.1) == 0

    def test_second_channel(self):
        assert dorsal_select(np.array([0.4, 0.01]), 0.1) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            dorsal_select(np.array([]), 0.1)


@pytest.mark.unit
class TestVentralSelect:
    """腹侧加权方向合成测试"""

    def test_single_channel(self):
        assert ventral_select(ventral_ep({0: 0.2}), TONIC, THETA_V) == pytest.approx(0.0)

    def test_midpoint_of_two_channels(self):
        assert ventral_select(ventral_ep({0: 0.2, 2: 0.2}), TONIC, THETA_V) == pytest.approx(10.0)

    def test_antipodal_cancellation(self):
        assert ventral_select(ventral_ep({0: 0.2, 18: 0.2}), TONIC, THETA_V) is None

    def test_wraps_across_zero(self):
        angle = ventral_select(ventral_ep({35: 0.2, 1: 0.2}), TONIC, THETA_V)
        assert abs(angle_diff(angle, 0.0)) < 1e-6

    def test_weighted_by_disinhibition(self):
        angle = ventral_select(ventral_ep({9: 0.3, 10: 0.1}), TONIC, THETA_V)
        assert 90.0 < angle < 95.0

    def test_below_threshold_ignored(self):
        assert ventral_select(ventral_ep({4: 0.04}), TONIC, THETA_V) is None
        assert ventral_select(ventral_ep({4: 0.04, 27: 0.2}), TONIC, THETA_V) == pytest.approx(270.0)

    def test_result_in_range(self):
        angle = ventral_select(ventral_ep({33: 0.3}), TONIC, THETA_V)
        assert 0.0 <= angle < 360.0
        assert angle == pytest.approx(330.0)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            ventral_select(np.full(35, TONIC), TONIC, THETA_V)


@pytest.mark.unit
class TestRestState:
    """静息状态测试"""

    def test_ventral_rest_symmetric(self):
        cfg = LoopConfig.ventral(dt=0.001)
        rest = rest_state(cfg, max_time=3.0)
        tonic = tonic_output(rest)
        assert tonic > 0.0
        assert ventral_select(rest.output(Nucleus.EP), tonic, THETA_V) is None

    def test_foreign_input_raises_tonic(self):
        cfg = LoopConfig.ventral(dt=0.001)
        plain = tonic_output(rest_state(cfg, max_time=3.0))
        coupled = tonic_output(rest_state(cfg, foreign_stn_sum=0.5, max_time=3.0))
        assert coupled > plain
