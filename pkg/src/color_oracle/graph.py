"""Graphs, colorings, exact shortest paths and the brute-force nearest-colored-node oracle.

Everything in this module is ground truth for the approximate structures: the
oracles are verified against `brute_nearest` and `all_color_distances`.
"""

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from color_oracle.exceptions import EmptyInput, InvalidVertex, NoSuchColor, OracleError

logger = logging.getLogger(__name__)


class Unreachable(enum.Enum):
    """Distance sentinel for vertices in another component."""

    UNREACHABLE = "unreachable"

    def __repr__(self) -> str:
        return "Unreachable"


UNREACHABLE = Unreachable.UNREACHABLE

Distance = Union[int, Unreachable]
Edge = Tuple[int, int, int]


@dataclass(frozen=True)
class Graph:
    """Weighted undirected multigraph on vertices 0..n-1 with positive integer weights."""

    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise OracleError(f"vertex count must be nonnegative, got {self.n}")
        object.__setattr__(self, "edges", tuple((int(u), int(v), int(w)) for u, v, w in self.edges))
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidVertex(f"edge ({u}, {v}) outside [0, {self.n})", operation="graph")
            if w < 1:
                raise OracleError(f"edge ({u}, {v}) has weight {w} < 1", operation="graph")

    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """Incidence lists: adjacency[u] holds (neighbor, weight) per incident edge."""
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            if u != v:
                adj[v].append((u, w))
        return tuple(tuple(row) for row in adj)

    @cached_property
    def nx_graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g

    def check_vertex(self, v: int, operation: Optional[str] = None) -> None:
        if not (0 <= v < self.n):
            raise InvalidVertex(f"vertex outside [0, {self.n})", vertex=v, operation=operation)


@dataclass(frozen=True)
class Coloring:
    """Total map vertex -> color in [0, sigma)."""

    sigma: int
    color_of: Tuple[int, ...]
    members: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "color_of", tuple(int(c) for c in self.color_of))
        if self.sigma < 1:
            raise OracleError(f"palette size must be positive, got {self.sigma}")
        buckets: List[List[int]] = [[] for _ in range(self.sigma)]
        for v, c in enumerate(self.color_of):
            if not (0 <= c < self.sigma):
                raise OracleError(
                    f"color outside [0, {self.sigma})", vertex=v, color=c, operation="coloring"
                )
            buckets[c].append(v)
        object.__setattr__(self, "members", tuple(tuple(b) for b in buckets))

    @property
    def n(self) -> int:
        return len(self.color_of)

    def recolored(self, v: int, c: int) -> "Coloring":
        """Return a copy with vertex v moved to color c."""
        colors = list(self.color_of)
        colors[v] = c
        return Coloring(self.sigma, tuple(colors))

    def check_color(self, c: int, operation: Optional[str] = None) -> None:
        if not (0 <= c < self.sigma):
            raise NoSuchColor(f"color outside [0, {self.sigma})", color=c, operation=operation)


@dataclass(frozen=True)
class DistResult:
    """Distance to the nearest colored node and a witness attaining it."""

    distance: Distance
    witness: Optional[int] = None

    def __post_init__(self):
        if (self.distance is UNREACHABLE) != (self.witness is None):
            raise OracleError("witness must be present iff the distance is finite")


def shortest_paths(g: Graph, source: int) -> Dict[int, Distance]:
    """
    Exact single-source distances.

    Args:
        g: Graph
        source: Source vertex

    Returns:
        Map vertex -> distance, UNREACHABLE for other components
    """
    g.check_vertex(source, operation="shortest_paths")
    lengths = nx.single_source_dijkstra_path_length(g.nx_graph, source)
    return {v: int(lengths[v]) if v in lengths else UNREACHABLE for v in range(g.n)}


def brute_nearest(g: Graph, col: Coloring, v: int, c: int) -> DistResult:
    """
    Exact nearest c-colored vertex from v, ties broken by smallest vertex id.

    Raises:
        NoSuchColor: V_c is empty
    """
    g.check_vertex(v, operation="brute_nearest")
    col.check_color(c, operation="brute_nearest")
    if not col.members[c]:
        raise NoSuchColor("no vertex has this color", color=c, operation="brute_nearest")
    lengths = nx.single_source_dijkstra_path_length(g.nx_graph, v)
    reachable = [(int(lengths[u]), u) for u in col.members[c] if u in lengths]
    if not reachable:
        return DistResult(UNREACHABLE)
    distance, witness = min(reachable)
    return DistResult(distance, witness)


def components(g: Graph) -> List[List[int]]:
    """Connected components as sorted vertex lists, ordered by smallest member."""
    parts = [sorted(part) for part in nx.connected_components(g.nx_graph)]
    return sorted(parts, key=lambda part: part[0])


def all_color_distances(g: Graph, col: Coloring) -> List[List[Distance]]:
    """
    Table [n x sigma] of dist(v, c), one multi-source Dijkstra pass per color.

    Empty colors yield an all-UNREACHABLE column.
    """
    table: List[List[Distance]] = [[UNREACHABLE] * col.sigma for _ in range(g.n)]
    for c, members in enumerate(col.members):
        if not members:
            continue
        lengths = nx.multi_source_dijkstra_path_length(g.nx_graph, set(members))
        for v, d in lengths.items():
            table[v][c] = int(d)
    return table


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs distances as a float matrix with `inf` across components."""
    if g.n == 0:
        raise EmptyInput("graph has no vertices", operation="distance_matrix")
    logger.debug("computing all-pairs distances for n=%d m=%d", g.n, len(g.edges))
    return np.asarray(nx.floyd_warshall_numpy(g.nx_graph, nodelist=range(g.n)), dtype=float)


def color_distance_matrix(distances: np.ndarray, col: Coloring) -> np.ndarray:
    """[n x sigma] float matrix of dist(v, c) read off an all-pairs matrix."""
    table = np.full((distances.shape[0], col.sigma), np.inf)
    for c, members in enumerate(col.members):
        if members:
            table[:, c] = distances[:, list(members)].min(axis=1)
    return table


def as_distance(value: float) -> Distance:
    """Convert a float distance (inf for disconnected) to the public representation."""
    return UNREACHABLE if np.isinf(value) else int(value)


def random_connected_graph(
    n: int, extra_edges: int = 0, max_weight: int = 10, seed: int = 0
) -> Graph:
    """
    Random connected graph: a random spanning tree plus extra random edges.

    Args:
        n: Vertex count
        extra_edges: Edges added on top of the spanning tree (may create parallels)
        max_weight: Weights are drawn uniformly from [1, max_weight]
        seed: RNG seed

    Returns:
        Graph
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges: List[Edge] = []
    for i in range(1, n):
        parent = order[rng.integers(0, i)]
        edges.append((int(order[i]), int(parent), int(rng.integers(1, max_weight + 1))))
    for _ in range(extra_edges if n > 1 else 0):
        u, v = rng.choice(n, size=2, replace=False)
        edges.append((int(u), int(v), int(rng.integers(1, max_weight + 1))))
    return Graph(n, tuple(edges))


def random_coloring(n: int, sigma: int, seed: int = 0, *, surjective: bool = True) -> Coloring:
    """Random coloring; with `surjective` (and n >= sigma) every color is used."""
    rng = np.random.default_rng(seed)
    colors = rng.integers(0, sigma, size=n)
    if surjective and n >= sigma:
        slots = rng.choice(n, size=sigma, replace=False)
        colors[slots] = np.arange(sigma)
    return Coloring(sigma, tuple(int(c) for c in colors))


def disjoint_union(parts: Sequence[Graph]) -> Graph:
    """Place graphs side by side, relabelling vertices consecutively."""
    edges: List[Edge] = []
    offset = 0
    for part in parts:
        edges.extend((u + offset, v + offset, w) for u, v, w in part.edges)
        offset += part.n
    return Graph(offset, tuple(edges))
