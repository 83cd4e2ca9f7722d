"""Range-maximum query, Euler-tour LCA and ordered integer key sets.

RangeMaxIndex is a sparse table of argmax indices (O(n log n) build, two
table reads per query). EulerLca reduces LCA to the same table over negated depths.
OrderedKeySet wraps a SortedList with strict predecessor/successor.
"""

from typing import Dict, Hashable, Iterable, List, Optional, Sequence

import numpy as np
from sortedcontainers import SortedList

from color_oracle.exceptions import EmptyInput, InvalidRange, KeyNotFound, NotATree


class RangeMaxIndex:
    """Sparse table answering range-argmax in constant time, smallest index on ties."""

    __slots__ = ("values", "table", "log", "lookups")

    def __init__(self, values: Sequence[int]):
        if len(values) == 0:
            raise EmptyInput("range-max index over an empty array", operation="rmq_build")
        self.values = np.asarray(values)
        m = len(self.values)
        self.log = np.zeros(m + 1, dtype=np.int64)
        if m > 1:
            self.log[2:] = np.floor(np.log2(np.arange(2, m + 1))).astype(np.int64)

        # table[j][i] = argmax over [i, i + 2^j)
        table = [np.arange(m, dtype=np.int64)]
        span = 1
        while 2 * span <= m:
            prev = table[-1]
            left = prev[: m - 2 * span + 1]
            right = prev[span : m - span + 1]
            table.append(np.where(self.values[left] >= self.values[right], left, right))
            span *= 2
        self.table = table
        self.lookups = 0

    def __len__(self) -> int:
        return len(self.values)

    def query(self, a: int, b: int) -> int:
        """Index of the maximum of values[a..b] (inclusive), smallest index on ties."""
        if not (0 <= a <= b < len(self.values)):
            raise InvalidRange(f"range [{a}, {b}] invalid for length {len(self.values)}")
        j = self.log[b - a + 1]
        row = self.table[j]
        left = int(row[a])
        right = int(row[b - (1 << j) + 1])
        self.lookups += 2
        if self.values[right] > self.values[left]:
            return right
        return left


def rmq_build(values: Sequence[int]) -> RangeMaxIndex:
    return RangeMaxIndex(values)


def rmq_query(r: RangeMaxIndex, a: int, b: int) -> int:
    return r.query(a, b)


class EulerLca:
    """Constant-time LCA over a rooted tree given as a parent map (root maps to itself)."""

    __slots__ = ("parent", "depth", "root", "euler", "first_occurrence", "_rmq")

    def __init__(self, parent: Dict[Hashable, Hashable], depth: Optional[Dict[Hashable, int]] = None):
        if not parent:
            raise EmptyInput("tree has no nodes", operation="lca_build")
        roots = [x for x, p in parent.items() if x == p]
        if len(roots) != 1:
            raise NotATree(f"expected exactly one root, found {len(roots)}", operation="lca_build")
        self.parent = dict(parent)
        self.root = roots[0]

        children: Dict[Hashable, List[Hashable]] = {x: [] for x in parent}
        for x, p in parent.items():
            if x != p:
                if p not in children:
                    raise NotATree(f"parent {p!r} of {x!r} is not a node", operation="lca_build")
                children[p].append(x)

        computed_depth: Dict[Hashable, int] = {self.root: 0}
        self.euler: List[Hashable] = []
        self.first_occurrence: Dict[Hashable, int] = {}
        euler_depths: List[int] = []
        stack = [(self.root, iter(children[self.root]))]
        self.first_occurrence[self.root] = 0
        self.euler.append(self.root)
        euler_depths.append(0)
        while stack:
            node, pending = stack[-1]
            child = next(pending, None)
            if child is None:
                stack.pop()
                if stack:
                    parent_node = stack[-1][0]
                    self.euler.append(parent_node)
                    euler_depths.append(computed_depth[parent_node])
                continue
            computed_depth[child] = computed_depth[node] + 1
            self.first_occurrence[child] = len(self.euler)
            self.euler.append(child)
            euler_depths.append(computed_depth[child])
            stack.append((child, iter(children[child])))

        if len(computed_depth) != len(parent):
            raise NotATree("some nodes are not reachable from the root", operation="lca_build")
        if depth is not None and any(depth[x] != d for x, d in computed_depth.items()):
            raise NotATree("depth map disagrees with the parent map", operation="lca_build")
        self.depth = computed_depth
        self._rmq = RangeMaxIndex([-d for d in euler_depths])

    def query(self, x: Hashable, y: Hashable) -> Hashable:
        a, b = self.first_occurrence[x], self.first_occurrence[y]
        if a > b:
            a, b = b, a
        return self.euler[self._rmq.query(a, b)]


def lca_build(parent: Dict[Hashable, Hashable], depth: Optional[Dict[Hashable, int]] = None) -> EulerLca:
    return EulerLca(parent, depth)


def lca_query(lca: EulerLca, x: Hashable, y: Hashable) -> Hashable:
    return lca.query(x, y)


class OrderedKeySet:
    """Dynamic set of integers in [0, universe) with strict predecessor/successor."""

    __slots__ = ("universe", "_keys")

    def __init__(self, universe: int, keys: Iterable[int] = ()):
        self.universe = universe
        self._keys = SortedList()
        for x in keys:
            self.insert(x)

    def _check(self, x: int) -> None:
        if not (0 <= x < self.universe):
            raise InvalidRange(f"key {x} outside [0, {self.universe})")

    def insert(self, x: int) -> None:
        self._check(x)
        if x not in self._keys:
            self._keys.add(x)

    def delete(self, x: int) -> None:
        self._check(x)
        try:
            self._keys.remove(x)
        except ValueError:
            raise KeyNotFound(f"key {x} not in set", operation="okset_delete") from None

    def pred(self, x: int) -> Optional[int]:
        """max{y in S : y < x}"""
        i = self._keys.bisect_left(x)
        return self._keys[i - 1] if i > 0 else None

    def succ(self, x: int) -> Optional[int]:
        """min{y in S : y > x}"""
        i = self._keys.bisect_right(x)
        return self._keys[i] if i < len(self._keys) else None

    def __contains__(self, x: int) -> bool:
        return x in self._keys

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self):
        return iter(self._keys)


def okset_insert(s: OrderedKeySet, x: int) -> None:
    s.insert(x)


def okset_delete(s: OrderedKeySet, x: int) -> None:
    s.delete(x)


def okset_pred(s: OrderedKeySet, x: int) -> Optional[int]:
    return s.pred(x)


def okset_succ(s: OrderedKeySet, x: int) -> Optional[int]:
    return s.succ(x)
