"""Boolean matrix-vector-vector products answered by color-connectivity queries.

Tree variant: a source s plus, for each row i, a path of vertices colored c_j
for j in M[i]; the first vertex of every nonempty row hangs off s. Processing
(u, v) detaches rows with u[i] = 0 and asks, for each j with v[j] = 1, whether a
c_j-colored vertex is still connected to s. Detached edges are restored after
every pair.

Compact variants use one vertex per row and one per column (1 + n1 + n2
vertices). Undirected: s - v_i weighs 2 and v_i - x_j weighs 1, so dist(s, c_j)
is 3 when an attached row contains j and 5 or more otherwise. Directed: arcs
s -> v_i and v_i -> x_j, and the answer is plain reachability from s.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import networkx as nx

from color_oracle.exceptions import DimensionError, OracleError, VariantError
from color_oracle.graph import UNREACHABLE, Coloring, Graph, brute_nearest

SOURCE = 0
SOURCE_EDGE_WEIGHT = 2


class GadgetVariant(str, enum.Enum):
    TREE = "tree"
    COMPACT = "compact"
    COMPACT_DIRECTED = "compact-directed"


Matrix = Sequence[Sequence[int]]


@dataclass
class Gadget:
    n1: int
    n2: int
    variant: GadgetVariant
    rows: Tuple[Tuple[int, ...], ...]
    attached: List[bool]
    # color j -> rows containing j
    rows_with: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        if self.variant is GadgetVariant.TREE:
            return 1 + sum(len(row) for row in self.rows)
        return 1 + self.n1 + self.n2

    def snapshot(self) -> Tuple[bool, ...]:
        return tuple(self.attached)

    def row_vertex(self, i: int) -> int:
        return 1 + i

    def column_vertex(self, j: int) -> int:
        return 1 + self.n1 + j

    @property
    def blank_color(self) -> int:
        return self.n2

    def to_graph(self) -> Tuple[Graph, Coloring]:
        """Undirected graph of the current attachment state with its coloring."""
        if self.variant is GadgetVariant.TREE:
            edges, colors = [], [self.blank_color]
            for i, row in enumerate(self.rows):
                first = len(colors)
                for offset, j in enumerate(row):
                    colors.append(j)
                    if offset:
                        edges.append((first + offset - 1, first + offset, 1))
                if row and self.attached[i]:
                    edges.append((SOURCE, first, 1))
            return Graph(len(colors), tuple(edges)), Coloring(self.n2 + 1, tuple(colors))
        edges = []
        for i, row in enumerate(self.rows):
            if self.attached[i]:
                edges.append((SOURCE, self.row_vertex(i), SOURCE_EDGE_WEIGHT))
            edges.extend((self.row_vertex(i), self.column_vertex(j), 1) for j in row)
        colors = [self.blank_color] * (1 + self.n1) + list(range(self.n2))
        return Graph(self.vertex_count, tuple(edges)), Coloring(self.n2 + 1, tuple(colors))

    def to_digraph(self) -> nx.DiGraph:
        """Directed arcs s -> v_i (attached rows) and v_i -> x_j."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.vertex_count))
        for i, row in enumerate(self.rows):
            if self.attached[i]:
                g.add_edge(SOURCE, self.row_vertex(i))
            g.add_edges_from((self.row_vertex(i), self.column_vertex(j)) for j in row)
        return g


def build_gadget(matrix: Matrix, variant: GadgetVariant = GadgetVariant.TREE) -> Gadget:
    """
    Build the reduction graph for a boolean matrix, all rows attached.

    Args:
        matrix: n1 x n2 matrix of 0/1
        variant: tree, compact or compact-directed

    Returns:
        Gadget
    """
    n1 = len(matrix)
    n2 = len(matrix[0]) if n1 else 0
    if n1 < 1 or n2 < 1:
        raise DimensionError(f"matrix must be at least 1x1, got {n1}x{n2}", operation="build_gadget")
    if any(len(row) != n2 for row in matrix):
        raise DimensionError("matrix rows differ in length", operation="build_gadget")
    rows = tuple(tuple(j for j, bit in enumerate(row) if bit) for row in matrix)
    rows_with: Dict[int, List[int]] = {}
    for i, row in enumerate(rows):
        for j in row:
            rows_with.setdefault(j, []).append(i)
    return Gadget(
        n1=n1,
        n2=n2,
        variant=GadgetVariant(variant),
        rows=rows,
        attached=[True] * n1,
        rows_with={j: tuple(r) for j, r in rows_with.items()},
    )


def _check_vectors(gad: Gadget, u: Sequence[int], v: Sequence[int]) -> None:
    if len(u) != gad.n1 or len(v) != gad.n2:
        raise DimensionError(
            f"vectors of length {len(u)}/{len(v)} for a {gad.n1}x{gad.n2} matrix",
            operation="process_pair",
        )


def _detach(gad: Gadget, u: Sequence[int]) -> List[int]:
    detached = [i for i in range(gad.n1) if not u[i] and gad.attached[i]]
    for i in detached:
        gad.attached[i] = False
    return detached


def _restore(gad: Gadget, detached: List[int]) -> None:
    for i in detached:
        gad.attached[i] = True


def process_pair(gad: Gadget, u: Sequence[int], v: Sequence[int]) -> bool:
    """
    u^T M v through source-edge deletions and color-connectivity queries.

    Raises:
        DimensionError: |u| != n1 or |v| != n2
    """
    _check_vectors(gad, u, v)
    detached = _detach(gad, u)
    try:
        return any(
            any(gad.attached[i] for i in gad.rows_with.get(j, ()))
            for j in range(gad.n2)
            if v[j]
        )
    finally:
        _restore(gad, detached)


def compact_distance_check(gad: Gadget, u: Sequence[int], v: Sequence[int]) -> bool:
    """
    u^T M v from the 3 versus >= 5 distance gap on the compact undirected graph.

    Raises:
        VariantError: gadget is not the compact undirected variant
    """
    if gad.variant is not GadgetVariant.COMPACT:
        raise VariantError(f"needs the compact variant, got {gad.variant.value}")
    _check_vectors(gad, u, v)
    detached = _detach(gad, u)
    try:
        graph, coloring = gad.to_graph()
        return any(brute_nearest(graph, coloring, SOURCE, j).distance == 3 for j in range(gad.n2) if v[j])
    finally:
        _restore(gad, detached)


def compact_distances(gad: Gadget, u: Sequence[int]) -> List[object]:
    """dist(s, c_j) for every column after detaching rows with u[i] = 0."""
    if gad.variant is not GadgetVariant.COMPACT:
        raise VariantError(f"needs the compact variant, got {gad.variant.value}")
    if len(u) != gad.n1:
        raise DimensionError(f"u has length {len(u)}, expected {gad.n1}")
    detached = _detach(gad, u)
    try:
        graph, coloring = gad.to_graph()
        return [brute_nearest(graph, coloring, SOURCE, j).distance for j in range(gad.n2)]
    finally:
        _restore(gad, detached)


def directed_reachability_check(gad: Gadget, u: Sequence[int], v: Sequence[int]) -> bool:
    """u^T M v as reachability of some c_j (v[j] = 1) from s along directed arcs."""
    if gad.variant is not GadgetVariant.COMPACT_DIRECTED:
        raise VariantError(f"needs the compact-directed variant, got {gad.variant.value}")
    _check_vectors(gad, u, v)
    detached = _detach(gad, u)
    try:
        reachable = nx.descendants(gad.to_digraph(), SOURCE)
        return any(gad.column_vertex(j) in reachable for j in range(gad.n2) if v[j])
    finally:
        _restore(gad, detached)


def direct_product(matrix: Matrix, u: Sequence[int], v: Sequence[int]) -> bool:
    """Reference boolean u^T M v."""
    return any(u[i] and v[j] and matrix[i][j] for i in range(len(u)) for j in range(len(v)))


def is_gap_distance(distance: object) -> bool:
    """True for the distances the compact graph can realize: 3, >= 5, or unreachable."""
    if distance is UNREACHABLE:
        return True
    if not isinstance(distance, int):
        raise OracleError(f"unexpected distance {distance!r}")
    return distance == 3 or distance >= 5
