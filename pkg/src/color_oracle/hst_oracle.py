"""Recolorable color distance oracle over a cover of dominating ultrametrics.

A cover is a list of HSTs plus a home tree per vertex such that for every v and
every u, dist(u, v) <= rho_home(v)(u, v) <= D * dist(u, v). Candidate trees come
from randomly shifted hierarchical clustering (random scale offset, random center
order per level, node label = cluster diameter). A candidate is accepted when it
certifies at least max(1, floor(|S|^(1-1/k))) of the still unassigned vertices S.

Each tree carries a ColoredAncestorIndex: leaves numbered in DFS preorder, so
every subtree owns a contiguous interval of numbers, and the nearest ancestor of
v holding a c-colored leaf is the deeper of lca(v, pred) and lca(v, succ) in the
ordered key set of color c.

Two trade-offs:
- FAST_QUERY: every tree colors every vertex; a recolor touches all s trees, a
  query reads T_home(v) only.
- FAST_UPDATE: a vertex is colored in its home tree only; a recolor touches one
  tree, a query takes the minimum over all s trees.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from color_oracle.exceptions import (
    DisconnectedInput,
    InvalidDistortion,
    InvalidK,
    InvalidVertex,
    NoSuchColor,
    NoSuchColorInComponent,
    NoSuchColorInTree,
    RetryBudgetExceeded,
    VariantError,
)
from color_oracle.graph import Coloring, Graph, components, distance_matrix
from color_oracle.structures import EulerLca, OrderedKeySet

logger = logging.getLogger(__name__)

DEFAULT_DISTORTION_FACTOR = 128
DEFAULT_COVER_ATTEMPTS = 32


class Variant(str, enum.Enum):
    FAST_QUERY = "dyn-fastquery"
    FAST_UPDATE = "dyn-fastupdate"


class Hst:
    """Rooted tree whose leaves are vertices, with labels strictly decreasing leaf-ward."""

    def __init__(self, parent: List[int], delta: List[int], leaf_of: Dict[int, int]):
        self.parent = parent
        self.delta = delta
        self.leaf_of = leaf_of
        self.vertex_of = {node: v for v, node in leaf_of.items()}
        self.root = next(x for x, p in enumerate(parent) if x == p)
        self.children: List[List[int]] = [[] for _ in parent]
        for x, p in enumerate(parent):
            if x != p:
                self.children[p].append(x)
        self.lca = EulerLca({x: p for x, p in enumerate(parent)})

    def __len__(self) -> int:
        return len(self.parent)

    @property
    def vertices(self) -> List[int]:
        return sorted(self.leaf_of)

    def depth(self, node: int) -> int:
        return self.lca.depth[node]

    def leaves_under(self, node: int) -> List[int]:
        """Vertices whose leaf lies in the subtree of `node`."""
        found, stack = [], [node]
        while stack:
            x = stack.pop()
            if x in self.vertex_of:
                found.append(self.vertex_of[x])
            stack.extend(self.children[x])
        return found

    def preorder(self) -> List[int]:
        order, stack = [], [self.root]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(reversed(self.children[x]))
        return order

    def ultrametric_matrix(self, vertices: Sequence[int]) -> np.ndarray:
        """rho over `vertices` (matrix indexed by position in `vertices`)."""
        position = {v: i for i, v in enumerate(vertices)}
        rho = np.zeros((len(vertices), len(vertices)), dtype=np.int64)
        for node in self.preorder():
            if node in self.vertex_of:
                continue
            under = [position[v] for v in self.leaves_under(node)]
            rho[np.ix_(under, under)] = self.delta[node]
        np.fill_diagonal(rho, 0)
        return rho


def ultra_dist(t: Hst, x: int, y: int) -> int:
    """rho(x, y) = delta(lca(leaf x, leaf y))."""
    return t.delta[t.lca.query(t.leaf_of[x], t.leaf_of[y])]


SplitFn = Callable[[List[int], int], Tuple[List[List[int]], int]]


def grow_hst(vertices: Sequence[int], dist: np.ndarray, split: SplitFn, top_state: int) -> Hst:
    """
    Build an HST top-down from a refinement rule.

    `split(members, state)` returns the child groups and the next state. Every
    node is labelled with its cluster diameter; a group whose diameter equals
    its parent's is merged into the parent, which keeps labels strictly
    decreasing. `dist` is indexed by vertex id.
    """
    parent: List[int] = []
    delta: List[int] = []
    leaf_of: Dict[int, int] = {}

    def new_node(par: Optional[int], label: int) -> int:
        node = len(parent)
        parent.append(node if par is None else par)
        delta.append(label)
        return node

    def diameter(members: List[int]) -> int:
        return int(dist[np.ix_(members, members)].max())

    members = list(vertices)
    if len(members) == 1:
        leaf_of[members[0]] = new_node(None, 0)
        return Hst(parent, delta, leaf_of)

    root = new_node(None, diameter(members))
    stack = [(root, members, top_state)]
    while stack:
        node, group, state = stack.pop()
        parts, next_state = split(group, state)
        for part in parts:
            if len(part) == 1:
                leaf_of[part[0]] = new_node(node, 0)
                continue
            label = diameter(part)
            if label == delta[node]:
                stack.append((node, part, next_state))
            else:
                stack.append((new_node(node, label), part, next_state))
    return Hst(parent, delta, leaf_of)


def shifted_clustering_hst(vertices: Sequence[int], dist: np.ndarray, rng: np.random.Generator) -> Hst:
    """
    Random hierarchical clustering: radius beta * 2^(l-2) * dmin at level l.

    At each level, every member joins the first center (in a random order of all
    vertices) within the level radius. Level 0 has radius < dmin/2, so clusters
    become singletons there.
    """
    verts = np.asarray(vertices)
    if len(verts) == 1:
        return grow_hst(vertices, dist, lambda members, state: ([members], state), 0)
    sub = dist[np.ix_(verts, verts)]
    off_diagonal = sub[~np.eye(len(verts), dtype=bool)]
    dmin, diam = float(off_diagonal.min()), float(off_diagonal.max())
    beta = rng.uniform(1.0, 2.0)
    order = verts[rng.permutation(len(verts))]
    top = max(1, math.ceil(math.log2(diam / dmin)) + 2)

    def split(members: List[int], level: int) -> Tuple[List[List[int]], int]:
        radius = beta * 2.0 ** (level - 3) * dmin
        within = dist[np.ix_(order, members)] <= radius
        center_index = within.argmax(axis=0)
        groups: Dict[int, List[int]] = {}
        for member, idx in zip(members, center_index):
            groups.setdefault(int(idx), []).append(member)
        return [groups[idx] for idx in sorted(groups)], level - 1

    return grow_hst(vertices, dist, split, top)


def anchored_hst(vertices: Sequence[int], dist: np.ndarray, center: int) -> Hst:
    """
    Nested balls around `center`: rho(center, u) <= 2 * dist(center, u) for all u.

    The node for radius r holds the leaves at distance exactly r and the node
    for the next smaller radius.
    """
    radius_of = {v: dist[center, v] for v in vertices}

    def split(members: List[int], _state: int) -> Tuple[List[List[int]], int]:
        outer = max(radius_of[v] for v in members)
        inner = [v for v in members if radius_of[v] < outer]
        shell = [[v] for v in members if radius_of[v] == outer]
        return ([inner] if inner else []) + shell, 0

    return grow_hst(vertices, dist, split, 0)


@dataclass
class UltrametricCover:
    """HSTs over one connected component plus a home tree per vertex."""

    trees: List[Hst]
    home: Dict[int, int]
    distortion: float
    k: int
    vertices: List[int] = field(default_factory=list)

    @property
    def epsilon(self) -> float:
        """epsilon such that D = 8(1 + epsilon)k."""
        return self.distortion / (8 * self.k) - 1

    def verify(self, dist: np.ndarray) -> List[Tuple[int, int]]:
        """Pairs (v, u) where rho_home(v)(v, u) leaves [dist, D * dist]."""
        verts = np.asarray(self.vertices)
        sub = dist[np.ix_(verts, verts)]
        violations: List[Tuple[int, int]] = []
        for t_index, tree in enumerate(self.trees):
            rho = tree.ultrametric_matrix(self.vertices)
            bad = (rho < sub) | (rho > self.distortion * sub)
            for a, v in enumerate(self.vertices):
                if self.home[v] != t_index:
                    continue
                violations.extend((v, int(verts[b])) for b in np.flatnonzero(bad[a]))
        return violations


def build_cover(
    g: Graph,
    k: int,
    distortion: Optional[float] = None,
    seed: int = 0,
    *,
    vertices: Optional[Sequence[int]] = None,
    distances: Optional[np.ndarray] = None,
    attempt_budget: int = DEFAULT_COVER_ATTEMPTS,
) -> UltrametricCover:
    """
    Las-Vegas cover construction over one connected vertex set.

    Args:
        g: Graph
        k: Stretch parameter (acceptance threshold |S|^(1-1/k))
        distortion: Factor D (default 128k)
        seed: RNG seed
        vertices: Component to cover (default: all vertices, which must be connected)
        distances: Optional precomputed all-pairs matrix
        attempt_budget: Candidate trees tried per round before settling

    Raises:
        InvalidK, InvalidDistortion, DisconnectedInput, RetryBudgetExceeded
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}", operation="build_cover")
    if distortion is None:
        distortion = DEFAULT_DISTORTION_FACTOR * k
    if distortion < 1:
        raise InvalidDistortion(f"distortion must be >= 1, got {distortion}", operation="build_cover")
    dist = distance_matrix(g) if distances is None else distances
    verts = list(range(g.n)) if vertices is None else sorted(vertices)
    sub = dist[np.ix_(verts, verts)]
    if np.isinf(sub).any():
        raise DisconnectedInput("cover input spans several components", operation="build_cover")

    rng = np.random.default_rng(seed)
    position = {v: i for i, v in enumerate(verts)}
    unassigned = list(verts)
    trees: List[Hst] = []
    home: Dict[int, int] = {}
    while unassigned:
        need = max(1, math.floor(len(unassigned) ** (1 - 1 / k)))
        rows = [position[v] for v in unassigned]
        best_tree, best_u = None, []
        for attempt in range(attempt_budget):
            candidate = shifted_clustering_hst(verts, dist, rng)
            certified = _certified(candidate, verts, sub, rows, unassigned, distortion)
            if len(certified) > len(best_u):
                best_tree, best_u = candidate, certified
            if len(certified) >= need:
                break
        if len(best_u) < need:
            logger.warning(
                "cover round: best candidate certifies %d of %d needed after %d attempts",
                len(best_u),
                need,
                attempt_budget,
            )
        if not best_u:
            best_tree = anchored_hst(verts, dist, unassigned[0])
            best_u = _certified(best_tree, verts, sub, rows, unassigned, distortion)
            if not best_u:
                raise RetryBudgetExceeded(
                    "no tree certifies any unassigned vertex",
                    attempts=attempt_budget,
                    operation="build_cover",
                )
        for v in best_u:
            home[v] = len(trees)
        trees.append(best_tree)
        taken = set(best_u)
        unassigned = [v for v in unassigned if v not in taken]
        logger.info(
            "cover round %d: certified %d, %d left", len(trees), len(best_u), len(unassigned)
        )
    return UltrametricCover(trees, home, float(distortion), k, verts)


def _certified(
    tree: Hst,
    verts: List[int],
    sub: np.ndarray,
    rows: List[int],
    unassigned: List[int],
    distortion: float,
) -> List[int]:
    rho = tree.ultrametric_matrix(verts)
    ok = (rho[rows] <= distortion * sub[rows]).all(axis=1)
    return [v for v, good in zip(unassigned, ok) if good]


class ColoredAncestorIndex:
    """Per-tree index answering nearest-colored-ancestor queries."""

    def __init__(self, tree: Hst, sigma: int):
        self.tree = tree
        self.lam: Dict[int, int] = {}
        self.vertex_at: List[int] = []
        for node in tree.preorder():
            if node in tree.vertex_of:
                v = tree.vertex_of[node]
                self.lam[v] = len(self.vertex_at)
                self.vertex_at.append(v)
        universe = len(self.vertex_at)
        self.keys: List[OrderedKeySet] = [OrderedKeySet(universe) for _ in range(sigma)]

    def color(self, v: int, c: int) -> None:
        self.keys[c].insert(self.lam[v])

    def uncolor(self, v: int, c: int) -> None:
        self.keys[c].delete(self.lam[v])

    def is_colored(self, v: int, c: int) -> bool:
        return self.lam[v] in self.keys[c]

    def nearest(self, v: int, c: int) -> Tuple[int, int]:
        """
        Nearest ancestor of leaf(v) with a c-colored leaf below it.

        Returns:
            (ancestor node, c-colored vertex below it)

        Raises:
            NoSuchColorInTree: no leaf of this tree is c-colored
        """
        keys = self.keys[c]
        leaf = self.tree.leaf_of[v]
        x = self.lam[v]
        if x in keys:
            return leaf, v
        best: Optional[Tuple[int, int]] = None
        for neighbor in (keys.pred(x), keys.succ(x)):
            if neighbor is None:
                continue
            w = self.vertex_at[neighbor]
            ancestor = self.tree.lca.query(leaf, self.tree.leaf_of[w])
            if best is None or self.tree.depth(ancestor) > self.tree.depth(best[0]):
                best = (ancestor, w)
        if best is None:
            raise NoSuchColorInTree("no c-colored leaf in tree", vertex=v, color=c)
        return best


@dataclass(frozen=True)
class HstEstimate:
    estimate: int
    witness: int


class HstOracle:
    """Recolorable oracle: one cover per connected component."""

    def __init__(
        self,
        graph: Graph,
        coloring: Coloring,
        k: int,
        *,
        distortion: Optional[float] = None,
        variant: Variant = Variant.FAST_QUERY,
        seed: int = 0,
        attempt_budget: int = DEFAULT_COVER_ATTEMPTS,
        distances: Optional[np.ndarray] = None,
    ):
        self.graph = graph
        self.sigma = coloring.sigma
        self.k = k
        self.variant = Variant(variant)
        self.distortion = DEFAULT_DISTORTION_FACTOR * k if distortion is None else distortion
        dist = distance_matrix(graph) if distances is None else distances

        self.covers: List[UltrametricCover] = []
        self.component_of: Dict[int, int] = {}
        for comp_id, part in enumerate(components(graph)):
            cover = build_cover(
                graph,
                k,
                self.distortion,
                seed=seed + comp_id,
                vertices=part,
                distances=dist,
                attempt_budget=attempt_budget,
            )
            self.covers.append(cover)
            for v in part:
                self.component_of[v] = comp_id
        self.indexes: List[List[ColoredAncestorIndex]] = [
            [ColoredAncestorIndex(tree, coloring.sigma) for tree in cover.trees]
            for cover in self.covers
        ]
        # Recolors update these in place; `coloring` is rebuilt only when read.
        self._colors: List[int] = list(coloring.color_of)
        self._color_total: List[int] = [len(members) for members in coloring.members]
        self._snapshot: Optional[Coloring] = coloring
        self._color_count: Dict[Tuple[int, int], int] = {}
        for v, c in enumerate(coloring.color_of):
            self._bump(v, c, +1)
            for index in self._trees_holding(v):
                index.color(v, c)

    @property
    def coloring(self) -> Coloring:
        """The current coloring."""
        if self._snapshot is None:
            self._snapshot = Coloring(self.sigma, tuple(self._colors))
        return self._snapshot

    @property
    def tree_count(self) -> int:
        return sum(len(cover.trees) for cover in self.covers)

    def _bump(self, v: int, c: int, step: int) -> None:
        key = (self.component_of[v], c)
        self._color_count[key] = self._color_count.get(key, 0) + step

    def _home_index(self, v: int) -> ColoredAncestorIndex:
        comp = self.component_of[v]
        return self.indexes[comp][self.covers[comp].home[v]]

    def _trees_holding(self, v: int) -> Iterable[ColoredAncestorIndex]:
        if self.variant is Variant.FAST_QUERY:
            return self.indexes[self.component_of[v]]
        return [self._home_index(v)]

    def _check(self, v: int, c: int, operation: str) -> None:
        if not (0 <= v < self.graph.n):
            raise InvalidVertex("vertex outside graph", vertex=v, operation=operation)
        if not (0 <= c < self.sigma) or not self._color_total[c]:
            raise NoSuchColor("no vertex has this color", vertex=v, color=c, operation=operation)
        if not self._color_count.get((self.component_of[v], c)):
            raise NoSuchColorInComponent(
                "color absent from the vertex's component", vertex=v, color=c, operation=operation
            )

    # -- lookups ---------------------------------------------------------
    def nearest_colored_ancestor(self, tree: int, v: int, c: int) -> int:
        """Nearest ancestor of v in tree `tree` of v's cover holding a c-colored leaf."""
        return self.indexes[self.component_of[v]][tree].nearest(v, c)[0]

    # -- recolor ---------------------------------------------------------
    def _recolor(self, v: int, c_new: int, trees: Iterable[ColoredAncestorIndex]) -> None:
        if not (0 <= v < self.graph.n):
            raise InvalidVertex("vertex outside graph", vertex=v, operation="recolor")
        if not (0 <= c_new < self.sigma):
            raise NoSuchColor(f"color outside [0, {self.sigma})", color=c_new, operation="recolor")
        c_old = self._colors[v]
        for index in trees:
            if index.is_colored(v, c_old):
                index.uncolor(v, c_old)
            index.color(v, c_new)
        self._bump(v, c_old, -1)
        self._bump(v, c_new, +1)
        self._color_total[c_old] -= 1
        self._color_total[c_new] += 1
        self._colors[v] = c_new
        self._snapshot = None

    def _require(self, variant: Variant, operation: str) -> None:
        if self.variant is not variant:
            raise VariantError(
                f"{operation} needs the {variant.value} variant, oracle is {self.variant.value}",
                operation=operation,
            )

    def recolor_fast_query(self, v: int, c_new: int) -> None:
        """Move v to c_new in every tree of its cover."""
        self._require(Variant.FAST_QUERY, "recolor_fast_query")
        self._recolor(v, c_new, self.indexes[self.component_of[v]])

    def recolor_fast_update(self, v: int, c_new: int) -> None:
        """Move v to c_new in its home tree only."""
        self._require(Variant.FAST_UPDATE, "recolor_fast_update")
        self._recolor(v, c_new, [self._home_index(v)])

    def recolor(self, v: int, c_new: int) -> None:
        if self.variant is Variant.FAST_QUERY:
            self.recolor_fast_query(v, c_new)
        else:
            self.recolor_fast_update(v, c_new)

    # -- query -----------------------------------------------------------
    def query_fast_query(self, v: int, c: int) -> HstEstimate:
        """One nearest-colored-ancestor lookup in T_home(v)."""
        self._require(Variant.FAST_QUERY, "query_fast_query")
        self._check(v, c, "query_fast_query")
        index = self._home_index(v)
        ancestor, witness = index.nearest(v, c)
        return HstEstimate(index.tree.delta[ancestor], witness)

    def query_fast_update(self, v: int, c: int) -> HstEstimate:
        """
        Minimum label over the nearest colored ancestors in all trees.

        Valid for both variants: fast-query trees hold every vertex, so the
        minimum is at most the home-tree estimate.
        """
        self._check(v, c, "query_fast_update")
        best: Optional[HstEstimate] = None
        for index in self.indexes[self.component_of[v]]:
            try:
                ancestor, witness = index.nearest(v, c)
            except NoSuchColorInTree:
                continue
            candidate = HstEstimate(index.tree.delta[ancestor], witness)
            if best is None or (candidate.estimate, candidate.witness) < (best.estimate, best.witness):
                best = candidate
        if best is None:
            raise NoSuchColorInTree("no tree holds the color", vertex=v, color=c)
        return best

    def query(self, v: int, c: int) -> HstEstimate:
        if self.variant is Variant.FAST_QUERY:
            return self.query_fast_query(v, c)
        return self.query_fast_update(v, c)
