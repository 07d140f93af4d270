"""
行为模块单元测试

包括：
- 动机公式
- 7扇区窗口的视觉感知
- 两条环路各变体的显著性
"""

import numpy as np
import pytest

from src.behavior.motivation import compute_motivations
from src.behavior.percepts import Percepts, compute_percepts, window_runs
from src.behavior.salience import NavVectors, dorsal_saliences, ventral_saliences
from src.models.object import InternalState, Motivations, ResourceKind, SalienceVariantName
from src.utils.config_loader import SalienceVariant

EXP12 = SalienceVariant(name=SalienceVariantName.EXP12)
EXP31 = SalienceVariant(name=SalienceVariantName.EXP31)
EXP32 = SalienceVariant(name=SalienceVariantName.EXP32)


def camera_with(gray: int, sectors) -> np.ndarray:
    cam = np.full(36, 200)
    cam[list(sectors)] = gray
    return cam


# ==================== 动机 ====================


@pytest.mark.unit
class TestMotivations:
    """动机计算测试"""

    def test_satiated(self):
        m = compute_motivations(InternalState(E=1.0, E_P=1.0))
        assert m.m_E == 0.0
        assert m.m_EP == 0.0

    def test_nothing_to_convert(self):
        m = compute_motivations(InternalState(E=0.0, E_P=0.0))
        assert m.m_E == pytest.approx(0.0)
        assert m.m_EP == 1.0

    def test_half(self):
        m = compute_motivations(InternalState(E=0.5, E_P=0.5))
        assert m.m_E == pytest.approx(0.5 * np.sqrt(0.75))
        assert m.m_EP == pytest.approx(0.5)

    def test_fear_and_disorientation(self):
        m = compute_motivations(InternalState(E=1.0, E_P=1.0, F=0.2), disorientation=1.7)
        assert m.m_DA == pytest.approx(0.2)
        assert m.m_BKA == 1.0

    def test_bounds_and_ordering(self):
        grid = np.linspace(0.0, 1.0, 11)
        for e in grid:
            previous = -1.0
            for ep in grid:
                m = compute_motivations(InternalState(E=e, E_P=ep))
                for v in (m.m_E, m.m_EP, m.m_DA, m.m_BKA):
                    assert 0.0 <= v <= 1.0
                assert m.m_E >= previous - 1e-12
                previous = m.m_E


# ==================== 感知 ====================


@pytest.mark.unit
class TestPercepts:
    """视觉感知测试"""

    def test_no_resource_color(self):
        p = compute_percepts(np.full(36, 200))
        for kind in ResourceKind:
            assert not p.prox[kind].any()
            assert p.m_prox[kind] == 0.0
            assert not p.usable[kind]

    def test_seven_sectors_usable(self):
        p = compute_percepts(camera_with(127, range(2, 9)))
        assert p.prox[ResourceKind.EP][5] == pytest.approx(1.0)
        assert p.usable[ResourceKind.EP]
        assert not p.usable[ResourceKind.E]

    def test_three_sectors(self):
        p = compute_percepts(camera_with(255, [35, 0, 1]))
        assert p.prox[ResourceKind.E][0] == pytest.approx(3 / 7)
        assert p.m_prox[ResourceKind.E] == pytest.approx(3 / 7)
        assert not p.usable[ResourceKind.E]

    def test_run_edges(self):
        """窗口与连续段的交集在段边缘变短"""
        p = compute_percepts(camera_with(127, range(10, 20)))
        prox = p.prox[ResourceKind.EP]
        assert prox[10] == pytest.approx(4 / 7)
        assert prox[13] == pytest.approx(1.0)
        assert prox[9] == 0.0

    def test_wraps_across_seam(self):
        p = compute_percepts(camera_with(31, [33, 34, 35, 0, 1, 2, 3]))
        assert p.prox[ResourceKind.DA][0] == pytest.approx(1.0)
        assert p.usable[ResourceKind.DA]

    def test_full_ring(self):
        out = window_runs(np.ones(36, dtype=bool))
        np.testing.assert_allclose(out, 1.0)

    def test_usable_implies_full_window(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            cam = rng.choice([127, 200], size=36)
            p = compute_percepts(cam)
            if p.usable[ResourceKind.EP]:
                mask = cam == 127
                assert any(mask[[(c + k) % 36 for k in range(-3, 4)]].all() for c in range(36))
            assert p.m_prox[ResourceKind.EP] == pytest.approx(p.prox[ResourceKind.EP].max())


# ==================== 显著性 ====================


@pytest.mark.unit
class TestDorsalSaliences:
    """背侧显著性测试"""

    def test_all_zero(self, empty_percepts):
        s = dorsal_saliences(empty_percepts, Motivations(), np.zeros(2), EXP12)
        np.testing.assert_allclose(s, [0.0, 0.0])

    def test_exp12_energy(self, percepts_of):
        p = percepts_of(ResourceKind.E)
        s = dorsal_saliences(p, Motivations(m_E=1.0), np.zeros(2), EXP12)
        assert s[0] == pytest.approx(1.8)

    def test_exp32_potential_energy(self, percepts_of):
        p = percepts_of(ResourceKind.EP)
        s = dorsal_saliences(p, Motivations(m_EP=1.0), np.zeros(2), EXP32)
        assert s[1] == pytest.approx(1.0)

    def test_exp31_same_as_exp12(self, percepts_of):
        p = percepts_of(ResourceKind.EP, 0.5)
        m = Motivations(m_E=0.3, m_EP=0.7, m_DA=0.2)
        persistence = np.array([0.1, 0.4])
        np.testing.assert_allclose(
            dorsal_saliences(p, m, persistence, EXP31), dorsal_saliences(p, m, persistence, EXP12)
        )

    def test_persistence_slope(self, empty_percepts):
        h = 1e-3
        base = dorsal_saliences(empty_percepts, Motivations(), np.array([0.2, 0.2]), EXP12)
        bumped = dorsal_saliences(empty_percepts, Motivations(), np.array([0.2 + h, 0.2]), EXP12)
        assert (bumped[0] - base[0]) / h == pytest.approx(0.4)


@pytest.mark.unit
class TestVentralSaliences:
    """腹侧显著性测试"""

    def test_exploration_only(self, empty_percepts):
        nav = NavVectors(expl=np.ones(36))
        s = ventral_saliences(empty_percepts, Motivations(), nav, np.zeros(36), EXP12)
        np.testing.assert_allclose(s, 0.25)

    def test_plan_weight(self, empty_percepts):
        plan = np.zeros(36)
        plan[4] = 1.0
        s = ventral_saliences(empty_percepts, Motivations(), NavVectors(plan=plan), np.zeros(36), EXP12)
        assert s[4] == pytest.approx(0.65)
        assert s[5] == 0.0

    def test_plan_weight_override(self, empty_percepts):
        plan = np.full(36, 0.25)
        variant = SalienceVariant(name=SalienceVariantName.EXP12, w_plan=0.45)
        s = ventral_saliences(empty_percepts, Motivations(), NavVectors(plan=plan), np.zeros(36), variant)
        np.testing.assert_allclose(s, 0.45 * 0.5)

    def test_fully_dangerous_direction(self, percepts_of):
        p = percepts_of(ResourceKind.DA)
        s = ventral_saliences(p, Motivations(m_DA=0.2), NavVectors(), np.zeros(36), EXP31)
        assert s[0] == pytest.approx(0.0)
        assert s[1] == pytest.approx(0.19 * 0.2)

    def test_exp32_plan_yields_to_visible_resource(self, percepts_of):
        plan = np.ones(36)
        p = percepts_of(ResourceKind.EP, 1.0)
        s = ventral_saliences(p, Motivations(), NavVectors(plan=plan), np.zeros(36), EXP32)
        assert s[10] == pytest.approx(0.0)

    def test_taxon(self, percepts_of):
        p = percepts_of(ResourceKind.EP, 1.0)
        s = ventral_saliences(p, Motivations(m_EP=1.0), NavVectors(), np.zeros(36), EXP12)
        assert s[0] == pytest.approx(0.55)

    def test_persistence_slope(self, empty_percepts):
        h = 1e-3
        nav = NavVectors()
        base = ventral_saliences(empty_percepts, Motivations(), nav, np.zeros(36), EXP12)
        bumped_p = np.zeros(36)
        bumped_p[7] = h
        bumped = ventral_saliences(empty_percepts, Motivations(), nav, bumped_p, EXP12)
        assert (bumped[7] - base[7]) / h == pytest.approx(0.2)

    def test_negative_plan_rejected(self, empty_percepts):
        plan = np.zeros(36)
        plan[0] = -0.1
        with pytest.raises(ValueError):
            ventral_saliences(empty_percepts, Motivations(), NavVectors(plan=plan), np.zeros(36), EXP12)

    def test_wrong_length_rejected(self, empty_percepts):
        with pytest.raises(ValueError):
            ventral_saliences(
                empty_percepts, Motivations(), NavVectors(plan=np.zeros(35)), np.zeros(36), EXP12
            )

    def test_percepts_empty_factory(self):
        p = Percepts.empty()
        assert set(p.prox) == set(ResourceKind)
