"""Static color distance oracle with O(log k) queries.

Build:
1. Per connected component, sample A_0 = V ⊇ A_1 ⊇ ... ⊇ A_{k-1}, keeping each
   vertex of A_{i-1} in A_i with probability sigma^(-1/k). A component is
   resampled (derived sub-seed) until its A_{k-1} is nonempty.
2. Pivots p_i(v) = nearest member of A_i (smallest id on ties) and gap arrays
   P_v[i] = dist(v, p_{i+1}(v)) - dist(v, p_i(v)) with a range-argmax index.
3. Bunches B(v) = {u in A_i \\ A_{i+1} : dist(v, u) < dist(v, p_{i+1}(v))},
   aggregated per color into B(c) with the exact dist(u, c) and a witness.

Query halves the feasible index interval [lower, upper] using the argmax of
the gaps on the left half, so it needs O(log k) bunch lookups instead of the
O(k) scan done by `query_naive`.

Guarantee: dist(v, c) <= estimate <= max(1, 4k - 3) * dist(v, c).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from color_oracle.exceptions import (
    InvalidK,
    InvalidVertex,
    NoSuchColor,
    NoSuchColorInComponent,
    OracleError,
    RetryBudgetExceeded,
)
from color_oracle.graph import Coloring, Graph, color_distance_matrix, components, distance_matrix
from color_oracle.structures import RangeMaxIndex

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_ATTEMPTS = 10_000


def stretch_bound(k: int) -> int:
    """Asserted stretch of the static oracle."""
    return max(1, 4 * k - 3)


def refined_stretch_target(k: int) -> int:
    """The tighter 4k-5 target; reported, not asserted."""
    return max(1, 4 * k - 5)


def iteration_bound(k: int) -> int:
    """Upper bound on query loop iterations: ceil(log_{3/2} k) + 1."""
    if k <= 1:
        return 1
    return math.ceil(math.log(k) / math.log(1.5) - 1e-12) + 1


@dataclass(frozen=True)
class QueryResult:
    estimate: int
    witness_pivot: int
    witness: int
    iterations: int


@dataclass(frozen=True)
class SpaceReport:
    bunch_entries: int
    gap_array_words: int


class StaticOracle:
    """Immutable static oracle; build with `StaticOracle.build` or `from_levels`."""

    def __init__(
        self,
        graph: Graph,
        coloring: Coloring,
        levels: Sequence[Set[int]],
        *,
        seed: Optional[int] = None,
        distances: Optional[np.ndarray] = None,
    ):
        if len(levels) < 1:
            raise InvalidK("need at least one level", operation="build")
        if coloring.n != graph.n:
            raise OracleError("coloring and graph disagree on n", operation="build")
        self.graph = graph
        self.coloring = coloring
        self.k = len(levels)
        self.seed = seed
        self.levels: Tuple[frozenset, ...] = tuple(frozenset(level) for level in levels)
        self._check_nesting()

        n, k = graph.n, self.k
        dist = distance_matrix(graph) if distances is None else distances
        parts = components(graph)
        self._check_top_level(parts)
        self.component_of = np.empty(n, dtype=np.int64)
        for comp_id, part in enumerate(parts):
            self.component_of[part] = comp_id
        self.component_colors: List[frozenset] = [
            frozenset(coloring.color_of[v] for v in part) for part in parts
        ]

        self.level_of = np.zeros(n, dtype=np.int64)
        for i, level in enumerate(self.levels):
            self.level_of[list(level)] = i

        self.pivots = np.empty((n, k), dtype=np.int64)
        self.pivot_dist = np.empty((n, k), dtype=np.int64)
        # Column k holds the +inf distance to the nonexistent p_k(v).
        pivot_dist_ext = np.full((n, k + 1), np.inf)
        for part in parts:
            part_arr = np.asarray(part)
            part_set = set(part)
            for i, level in enumerate(self.levels):
                candidates = np.asarray(sorted(level & part_set))
                sub = dist[np.ix_(part_arr, candidates)]
                best = sub.argmin(axis=1)
                self.pivots[part_arr, i] = candidates[best]
                chosen = sub[np.arange(len(part_arr)), best]
                self.pivot_dist[part_arr, i] = chosen.astype(np.int64)
                pivot_dist_ext[part_arr, i] = chosen

        self.gaps = np.diff(self.pivot_dist, axis=1)
        self.gap_rmq: List[Optional[RangeMaxIndex]] = [
            RangeMaxIndex(self.gaps[v]) if k > 1 else None for v in range(n)
        ]

        # color_bunches[c][u] = (dist(u, c), nearest c-colored vertex)
        self.color_bunches: List[Dict[int, Tuple[int, int]]] = [{} for _ in range(coloring.sigma)]
        to_color = color_distance_matrix(dist, coloring)
        for comp_id, part in enumerate(parts):
            part_arr = np.asarray(part)
            sub = dist[np.ix_(part_arr, part_arr)]
            threshold = pivot_dist_ext[part_arr][:, self.level_of[part_arr] + 1]
            in_bunch = sub < threshold  # in_bunch[a, b]: part[b] in B(part[a])
            for c in self.component_colors[comp_id]:
                rows = [a for a, v in enumerate(part) if coloring.color_of[v] == c]
                union = np.flatnonzero(in_bunch[rows].any(axis=0))
                colored = np.asarray(coloring.members[c])
                nearest = colored[dist[np.ix_(part_arr[union], colored)].argmin(axis=1)]
                for b, w in zip(union, nearest):
                    u = part[b]
                    self.color_bunches[c][u] = (int(to_color[u, c]), int(w))

        logger.info(
            "static oracle: n=%d k=%d level sizes=%s bunch entries=%d",
            n,
            k,
            [len(level) for level in self.levels],
            self.space_report().bunch_entries,
        )

    def _check_nesting(self) -> None:
        if set(self.levels[0]) != set(range(self.graph.n)):
            raise OracleError("A_0 must be the full vertex set", operation="build")
        for i in range(1, self.k):
            if not self.levels[i] <= self.levels[i - 1]:
                raise OracleError(f"A_{i} is not nested in A_{i - 1}", operation="build")

    def _check_top_level(self, parts: List[List[int]]) -> None:
        top = self.levels[-1]
        for part in parts:
            if not top & set(part):
                raise OracleError(
                    f"A_{self.k - 1} is empty in the component of vertex {part[0]}",
                    operation="build",
                )

    @classmethod
    def build(
        cls,
        graph: Graph,
        coloring: Coloring,
        k: int,
        seed: int = 0,
        *,
        sample_attempts: int = DEFAULT_SAMPLE_ATTEMPTS,
        distances: Optional[np.ndarray] = None,
    ) -> "StaticOracle":
        """
        Sample the hierarchy and build the oracle.

        Args:
            graph: Input graph
            coloring: Vertex coloring
            k: Level count (>= 1)
            seed: RNG seed; each component uses the sub-seed (seed, component, attempt)
            sample_attempts: Resampling budget per component
            distances: Optional precomputed all-pairs matrix

        Raises:
            InvalidK: k < 1
            RetryBudgetExceeded: a component never got a nonempty top level
        """
        if k < 1:
            raise InvalidK(f"k must be >= 1, got {k}", operation="build")
        if graph.n == 0:
            raise OracleError("graph has no vertices", operation="build")
        levels = sample_levels(graph, coloring.sigma, k, seed, sample_attempts=sample_attempts)
        return cls(graph, coloring, levels, seed=seed, distances=distances)

    @classmethod
    def from_levels(
        cls, graph: Graph, coloring: Coloring, levels: Sequence[Set[int]]
    ) -> "StaticOracle":
        """Build from an explicit hierarchy A_0 ⊇ ... ⊇ A_{k-1}."""
        return cls(graph, coloring, levels)

    # ------------------------------------------------------------------
    def _precheck(self, v: int, c: int, operation: str) -> Dict[int, Tuple[int, int]]:
        if not (0 <= v < self.graph.n):
            raise InvalidVertex("vertex outside graph", vertex=v, operation=operation)
        if not (0 <= c < self.coloring.sigma) or not self.coloring.members[c]:
            raise NoSuchColor("no vertex has this color", vertex=v, color=c, operation=operation)
        if c not in self.component_colors[self.component_of[v]]:
            raise NoSuchColorInComponent(
                "color absent from the vertex's component", vertex=v, color=c, operation=operation
            )
        return self.color_bunches[c]

    def _search(
        self, v: int, bunch: Dict[int, Tuple[int, int]], trace: Optional[List[Tuple[int, int]]]
    ) -> Tuple[int, int]:
        lower, upper = 0, self.k - 1
        iterations = 0
        pivots = self.pivots[v]
        if trace is not None:
            trace.append((lower, upper))
        while lower != upper:
            i = (lower + upper + 1) // 2
            j = self.gap_rmq[v].query(lower, i - 1)
            if int(pivots[j]) not in bunch:
                lower = i
            else:
                upper = j
            iterations += 1
            if trace is not None:
                trace.append((lower, upper))
        return lower, iterations

    def query(self, v: int, c: int) -> QueryResult:
        """
        Approximate dist(v, c) in O(log k) bunch lookups.

        Returns:
            QueryResult with the estimate, the pivot p_lower(v) it goes through,
            a c-colored witness realizing it, and the loop iteration count

        Raises:
            NoSuchColor / NoSuchColorInComponent
        """
        bunch = self._precheck(v, c, "query")
        lower, iterations = self._search(v, bunch, None)
        pivot = int(self.pivots[v, lower])
        to_color, witness = bunch[pivot]
        return QueryResult(int(self.pivot_dist[v, lower]) + to_color, pivot, witness, iterations)

    def query_naive(self, v: int, c: int) -> QueryResult:
        """Classic bunch walk: first i with p_i(v) in B(c). Iterations count membership checks."""
        bunch = self._precheck(v, c, "query_naive")
        checks = 0
        for i in range(self.k):
            checks += 1
            pivot = int(self.pivots[v, i])
            if pivot in bunch:
                to_color, witness = bunch[pivot]
                return QueryResult(int(self.pivot_dist[v, i]) + to_color, pivot, witness, checks)
        # A_{k-1} ⊆ B(c) for every color present in the component.
        raise OracleError("top-level pivot missing from bunch", vertex=v, color=c)

    def feasibility_trace(self, v: int, c: int) -> List[Tuple[int, int]]:
        """(lower, upper) before the loop and after every iteration."""
        bunch = self._precheck(v, c, "feasibility_trace")
        trace: List[Tuple[int, int]] = []
        self._search(v, bunch, trace)
        return trace

    def space_report(self) -> SpaceReport:
        return SpaceReport(
            bunch_entries=sum(len(b) for b in self.color_bunches),
            gap_array_words=self.graph.n * (self.k - 1),
        )


def sample_levels(
    graph: Graph,
    sigma: int,
    k: int,
    seed: int,
    *,
    sample_attempts: int = DEFAULT_SAMPLE_ATTEMPTS,
) -> List[Set[int]]:
    """
    Sample A_0 ⊇ ... ⊇ A_{k-1} per component with probability sigma^(-1/k) per level.

    Raises:
        RetryBudgetExceeded: a component's A_{k-1} stayed empty for every attempt
    """
    prob = sigma ** (-1.0 / k)
    levels: List[Set[int]] = [set(range(graph.n))] + [set() for _ in range(k - 1)]
    for comp_id, part in enumerate(components(graph)):
        for attempt in range(sample_attempts):
            rng = np.random.default_rng([seed, comp_id, attempt])
            current = np.asarray(part)
            drawn = []
            for _ in range(1, k):
                current = current[rng.random(len(current)) < prob]
                drawn.append(current)
            if k == 1 or len(drawn[-1]) > 0:
                break
            logger.debug("component %d: empty top level on attempt %d", comp_id, attempt)
        else:
            raise RetryBudgetExceeded(
                f"top level stayed empty in component of vertex {part[0]}",
                attempts=sample_attempts,
                operation="build",
            )
        for i, members in enumerate(drawn, start=1):
            levels[i].update(int(x) for x in members)
    return levels
