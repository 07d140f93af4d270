"""
稠密拓扑地图
节点保存环境签名（36方向平均灰度 + 8方向声呐）与资源关联权重，边保存相对距离与方位
"""

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from src.models.object import EdgeRecord, MapDocument, NodeRecord, ResourceKind
from src.utils.config_loader import ConfigError, NavigationConfig
from src.utils.helpers import N_DIRECTIONS, polar_to_xy, wrap_deg, xy_to_polar
from src.utils.logger import get_logger

logger = get_logger(__name__)

N_SONAR = 8
SONAR_RANGE = 5.0
KINDS = (ResourceKind.E, ResourceKind.EP, ResourceKind.DA)
KIND_COLUMN = {kind: i for i, kind in enumerate(KINDS)}


@dataclass
class Signature:
    """环境签名，声呐已按罗盘对齐到45°绝对方向"""

    gray: np.ndarray
    sonar: np.ndarray


@dataclass
class TopoNode:
    id: int
    signature: Signature
    resource_w: Dict[ResourceKind, float]
    visit_count: int


@dataclass
class TopoEdge:
    from_id: int
    to_id: int
    distance: float
    bearing: float


@dataclass
class OdometryTrack:
    """自锚点节点以来累计的里程位移，以及锚定时的置信分布"""

    anchor: Optional[int] = None
    offset: np.ndarray = field(default_factory=lambda: np.zeros(2))
    anchor_belief: Optional[np.ndarray] = None

    @property
    def displacement(self) -> Tuple[float, float]:
        return xy_to_polar(self.offset)


def signature_similarity(a: Signature, b: Signature) -> float:
    """灰度与声呐平均差异各占一半的相似度，取值 [0, 1]"""
    d_gray = float(np.abs(a.gray - b.gray).mean()) / 255.0
    d_sonar = float(np.abs(a.sonar - b.sonar).mean()) / SONAR_RANGE
    return 0.5 * (1.0 - d_gray) + 0.5 * (1.0 - d_sonar)


class TopoMap:
    """拓扑地图，签名与资源权重按行存放在numpy数组中"""

    def __init__(self, scene: str = ""):
        self.scene = scene
        self.gray = np.zeros((0, N_DIRECTIONS))
        self.sonar = np.zeros((0, N_SONAR))
        self.resource_w = np.zeros((0, len(KINDS)))
        self.visits = np.zeros(0, dtype=int)
        self.edges: List[TopoEdge] = []
        self.adjacency: List[List[Tuple[int, float, float]]] = []
        self.version = 0  # 结构变化计数，用于缓存失效
        self._paths: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._paths_version = -1
        self._edge_cache: Tuple[np.ndarray, ...] = ()
        self._edge_lookup: Dict[Tuple[int, int], np.ndarray] = {}
        self._edge_version = -1

    def __len__(self) -> int:
        return len(self.visits)

    # ---------- 结构 ----------

    def add_node(self, sig: Signature) -> int:
        node_id = len(self)
        self.gray = np.vstack([self.gray, np.asarray(sig.gray, dtype=float)])
        self.sonar = np.vstack([self.sonar, np.asarray(sig.sonar, dtype=float)])
        self.resource_w = np.vstack([self.resource_w, np.zeros(len(KINDS))])
        self.visits = np.append(self.visits, 1)
        self.adjacency.append([])
        self.version += 1
        return node_id

    def add_edge(self, a: int, b: int, distance: float, bearing: float) -> None:
        if distance <= 0:
            raise ValueError(f"边长度必须为正: {distance}")
        bearing = wrap_deg(bearing)
        self.edges.append(TopoEdge(a, b, distance, bearing))
        self.adjacency[a].append((b, distance, bearing))
        self.adjacency[b].append((a, distance, wrap_deg(bearing + 180.0)))
        self.version += 1

    def neighbors(self, node: int) -> List[Tuple[int, float, float]]:
        """(邻居, 距离, 从node出发的方位) 列表"""
        return self.adjacency[node]

    def edge_arrays(self) -> Tuple[np.ndarray, ...]:
        """
        按方向展开的全部边：(起点, 终点, 距离, 从起点出发的方位)，每条边两行，按地图版本缓存

        行序与逐节点遍历 neighbors 的顺序一致
        """
        if self._edge_version != self.version:
            rows = [(a, b, d, br) for a, nbrs in enumerate(self.adjacency) for b, d, br in nbrs]
            table = np.array(rows, dtype=float).reshape(-1, 4)
            self._edge_cache = (
                table[:, 0].astype(int),
                table[:, 1].astype(int),
                table[:, 2].copy(),
                table[:, 3].copy(),
            )
            self._edge_lookup = {}
            for a, b, d, br in rows:
                self._edge_lookup.setdefault((a, b), polar_to_xy(d, br))
            self._edge_version = self.version
        return self._edge_cache

    def edge_vector(self, a: int, b: int) -> np.ndarray:
        """a→b 的位移向量，两节点间有多条边时取最早加入的一条"""
        self.edge_arrays()
        return self._edge_lookup[(a, b)]

    def node(self, node_id: int) -> TopoNode:
        return TopoNode(
            id=node_id,
            signature=Signature(self.gray[node_id].copy(), self.sonar[node_id].copy()),
            resource_w={k: float(self.resource_w[node_id, KIND_COLUMN[k]]) for k in KINDS},
            visit_count=int(self.visits[node_id]),
        )

    def weights(self, kind: ResourceKind) -> np.ndarray:
        return self.resource_w[:, KIND_COLUMN[kind]]

    def similarities(self, sig: Signature, ids: Optional[np.ndarray] = None) -> np.ndarray:
        """签名与（部分）节点的相似度"""
        gray = self.gray if ids is None else self.gray[ids]
        sonar = self.sonar if ids is None else self.sonar[ids]
        d_gray = np.abs(gray - sig.gray).mean(axis=1) / 255.0
        d_sonar = np.abs(sonar - sig.sonar).mean(axis=1) / SONAR_RANGE
        return 0.5 * (1.0 - d_gray) + 0.5 * (1.0 - d_sonar)

    def blend_signature(self, node: int, sig: Signature, rate: float) -> None:
        self.gray[node] += rate * (sig.gray - self.gray[node])
        self.sonar[node] += rate * (sig.sonar - self.sonar[node])

    # ---------- 最短路径 ----------

    def shortest_paths(self, source: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        单源Dijkstra（边权为距离），按地图版本缓存

        Returns:
            (距离数组, 前驱数组)，不可达为inf/-1
        """
        if self._paths_version != self.version:
            self._paths.clear()
            self._paths_version = self.version
        cached = self._paths.get(source)
        if cached is not None:
            return cached

        n = len(self)
        dist = np.full(n, math.inf)
        pred = np.full(n, -1, dtype=int)
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w, _ in self.adjacency[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
        self._paths[source] = (dist, pred)
        return dist, pred

    # ---------- 序列化 ----------

    def to_document(self) -> MapDocument:
        nodes = [
            NodeRecord(
                id=i,
                gray=self.gray[i].tolist(),
                sonar=self.sonar[i].tolist(),
                resource_w={k.name: float(self.resource_w[i, KIND_COLUMN[k]]) for k in KINDS},
                visits=int(self.visits[i]),
            )
            for i in range(len(self))
        ]
        edges = [
            EdgeRecord(from_=e.from_id, to=e.to_id, dist_m=e.distance, bearing_deg=e.bearing)
            for e in self.edges
        ]
        return MapDocument(scene=self.scene, nodes=nodes, edges=edges)

    @classmethod
    def from_document(cls, doc: MapDocument) -> "TopoMap":
        topo = cls(scene=doc.scene)
        for expected, record in enumerate(sorted(doc.nodes, key=lambda r: r.id)):
            if record.id != expected:
                raise ConfigError(f"地图节点编号不连续: {record.id}")
            node_id = topo.add_node(Signature(np.array(record.gray), np.array(record.sonar)))
            for kind in KINDS:
                topo.resource_w[node_id, KIND_COLUMN[kind]] = record.resource_w.get(kind.name, 0.0)
            topo.visits[node_id] = record.visits
        for edge in doc.edges:
            if not (0 <= edge.from_ < len(topo) and 0 <= edge.to < len(topo)):
                raise ConfigError(f"地图边引用了不存在的节点: {edge.from_}->{edge.to}")
            topo.add_edge(edge.from_, edge.to, edge.dist_m, edge.bearing_deg)
        return topo

    def copy(self) -> "TopoMap":
        return TopoMap.from_document(self.to_document())

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_document().model_dump_json(by_alias=True, indent=1), encoding="utf-8")
        logger.info(f"拓扑地图已保存: {path} ({len(self)} 个节点, {len(self.edges)} 条边)")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TopoMap":
        try:
            doc = MapDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"地图文件无效 {path}: {e}") from e
        return cls.from_document(doc)


def update_map(
    topo: TopoMap,
    belief: np.ndarray,
    track: OdometryTrack,
    sig: Signature,
    cfg: NavigationConfig,
) -> Tuple[TopoMap, np.ndarray, bool]:
    """
    建图：在新区域创建节点，否则用滑动平均更新当前节点签名

    Args:
        topo: 拓扑地图（原地修改）
        belief: 当前置信分布
        track: 自锚点以来的里程（原地修改）
        sig: 当前签名
        cfg: 导航配置

    Returns:
        (地图, 置信分布, 是否新建了节点)
    """
    if len(topo) == 0:
        node = topo.add_node(sig)
        _reset_track(track, node, np.ones(1))
        logger.debug("空地图，创建首个节点")
        return topo, np.ones(1), True

    current = track.anchor if track.anchor is not None else int(np.argmax(belief))
    distance, bearing = track.displacement

    nearby = np.array([current] + [nbr for nbr, _, _ in topo.neighbors(current)])
    best = float(topo.similarities(sig, nearby).max())
    far = distance >= cfg.node_spacing
    unfamiliar = best < cfg.similarity_new and distance >= cfg.min_edge

    if far or unfamiliar:
        node = topo.add_node(sig)
        topo.add_edge(current, node, distance, bearing)
        belief = np.zeros(len(topo))
        belief[node] = 1.0
        _reset_track(track, node, belief.copy())
        logger.debug(
            f"新建节点 {node}: 距节点{current} {distance:.2f}m/{bearing:.0f}°, 相似度 {best:.3f}"
        )
        return topo, belief, True

    topo.blend_signature(current, sig, cfg.signature_rate)
    topo.visits[current] += 1
    return topo, belief, False


def _reset_track(track: OdometryTrack, node: int, belief: np.ndarray) -> None:
    track.anchor = node
    track.offset = np.zeros(2)
    track.anchor_belief = belief


def reanchor(topo: TopoMap, track: OdometryTrack, belief: np.ndarray) -> None:
    """最可能节点变化时，将里程原点移到新节点"""
    best = int(np.argmax(belief))
    if track.anchor is None:
        track.anchor = best
        track.anchor_belief = belief.copy()
        return
    if best == track.anchor:
        return
    for nbr, dist, bearing in topo.neighbors(track.anchor):
        if nbr == best:
            track.offset = track.offset - polar_to_xy(dist, bearing)
            break
    else:
        track.offset = np.zeros(2)
    track.anchor = best
    track.anchor_belief = belief.copy()
