"""
二维线段世界
墙体与资源方块均以线段表示，射线投射用于相机与声呐
"""

from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from src.models.object import RESOURCE_GRAY, ResourceKind, ResourceSpec, SceneDocument
from src.utils.config_loader import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# 射线参数下限，避免与起点所在线段自相交
_T_MIN = 1e-9


def _resource_edges(res: ResourceSpec, half: float) -> List[Tuple[float, float, float, float]]:
    x0, x1 = res.cx - half, res.cx + half
    y0, y1 = res.cy - half, res.cy + half
    return [(x0, y0, x1, y0), (x1, y0, x1, y1), (x1, y1, x0, y1), (x0, y1, x0, y0)]


class Scene:
    """场景：墙体线段、资源方块及其是否存在"""

    def __init__(self, doc: SceneDocument, resource_half_size: float = 0.25):
        self.doc = doc
        self.name = doc.name
        self.half = resource_half_size
        self.resources: Dict[str, ResourceSpec] = {r.name: r.model_copy() for r in doc.resources}
        self.walls = np.array(
            [[s.x1, s.y1, s.x2, s.y2] for s in doc.segments], dtype=float
        ).reshape(-1, 4)
        self.wall_gray = np.array([s.gray for s in doc.segments], dtype=int)
        self._rebuild_visual()

    def _rebuild_visual(self) -> None:
        """相机可见线段 = 墙体 + 存在的资源方块四边"""
        segs = [self.walls]
        grays = [self.wall_gray]
        for res in self.resources.values():
            if res.present:
                segs.append(np.array(_resource_edges(res, self.half)))
                grays.append(np.full(4, RESOURCE_GRAY[res.kind], dtype=int))
        self.visual = np.vstack(segs)
        self.visual_gray = np.concatenate(grays)

    def set_present(self, name: str, present: bool) -> None:
        if name not in self.resources:
            raise KeyError(f"场景 {self.name} 中不存在资源: {name}")
        self.resources[name].present = present
        self._rebuild_visual()

    def hide(self, names: Iterable[str]) -> None:
        for name in names:
            self.set_present(name, False)

    def present_resources(self, kind: Optional[ResourceKind] = None) -> List[ResourceSpec]:
        return [r for r in self.resources.values() if r.present and (kind is None or r.kind == kind)]

    def cast(
        self,
        origin: np.ndarray,
        angles_deg: np.ndarray,
        visual: bool = True,
        max_range: float = np.inf,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        向量化射线投射

        Args:
            origin: 射线起点 (x, y)
            angles_deg: 射线方向（度）
            visual: True时包括资源方块（相机），False时仅墙体（声呐）
            max_range: 最大距离

        Returns:
            (距离数组, 灰度数组)，未命中时距离为inf、灰度为0
        """
        segs = self.visual if visual else self.walls
        grays = self.visual_gray if visual else self.wall_gray
        angles = np.deg2rad(np.atleast_1d(np.asarray(angles_deg, dtype=float)))
        n = len(angles)
        if len(segs) == 0:
            return np.full(n, np.inf), np.zeros(n, dtype=int)

        ox, oy = float(origin[0]), float(origin[1])
        dx = np.cos(angles)[:, None]
        dy = np.sin(angles)[:, None]
        ax, ay = segs[:, 0][None, :], segs[:, 1][None, :]
        ex = (segs[:, 2] - segs[:, 0])[None, :]
        ey = (segs[:, 3] - segs[:, 1])[None, :]

        # 求解 origin + t·d = a + u·e
        denom = dx * ey - dy * ex
        wx, wy = ax - ox, ay - oy
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
        hit = (np.abs(denom) > 1e-12) & (t > _T_MIN) & (u >= 0.0) & (u <= 1.0)
        t = np.where(hit, t, np.inf)

        idx = np.argmin(t, axis=1)
        dist = t[np.arange(n), idx]
        gray = np.where(np.isfinite(dist), grays[idx], 0)
        out_of_range = dist > max_range
        dist = np.where(out_of_range, np.inf, dist)
        gray = np.where(out_of_range, 0, gray)
        return dist, gray.astype(int)

    def min_wall_distance(self, point: np.ndarray) -> float:
        """点到所有墙体线段的最小距离"""
        if len(self.walls) == 0:
            return float("inf")
        p = np.asarray(point, dtype=float)
        a = self.walls[:, :2]
        e = self.walls[:, 2:] - a
        t = np.clip(((p - a) * e).sum(axis=1) / (e * e).sum(axis=1), 0.0, 1.0)
        closest = a + t[:, None] * e
        return float(np.linalg.norm(closest - p, axis=1).min())


def load_scene(path: Union[str, Path], resource_half_size: float = 0.25) -> Scene:
    """
    读取场景JSON文件

    Raises:
        FileNotFoundError: 文件不存在
        ConfigError: 文件内容无效
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"场景文件不存在: {path}")
    try:
        doc = SceneDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigError(f"场景文件无效 {path}: {e}") from e
    if not doc.name:
        doc.name = path.stem
    logger.debug(f"加载场景 {doc.name}: {len(doc.segments)} 段墙体, {len(doc.resources)} 个资源")
    return Scene(doc, resource_half_size)
