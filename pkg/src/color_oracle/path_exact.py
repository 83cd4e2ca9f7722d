"""Exact nearest colored position on a leveled weighted path from a factor-b estimate.

Positions 1..n (n a power of b). The edge (x, x+1) weighs b^l for the largest
b^l dividing x, so any walk leaving a level-l interval pays at least b^l.
Every position x divisible by b^l stores, per level l, a hash map
color -> first position of that color in [x, end(x, l)], where end(x, l) is the
next multiple of b^(l+1) strictly after x. The maps at iota(i, 0), iota(i, 1), ...
chain into contiguous cover of [i, n], and an estimate in [dist, b * dist] pins
the answer to a window of O(1) levels.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from color_oracle.exceptions import (
    ContractViolation,
    InvalidBase,
    InvalidVertex,
    NoSuchColor,
    OracleError,
)
from color_oracle.graph import Graph

logger = logging.getLogger(__name__)

PADDING_COLOR = -1
DEFAULT_WINDOW = 3


class Mode(str, Enum):
    FAST = "fast"
    EXACT = "exact"


def iota(x: int, l: int, b: int) -> int:
    """Smallest multiple of b^l that is >= x."""
    step = b**l
    return -(-x // step) * step


def largest_power_dividing(x: int, b: int) -> int:
    """Largest l with b^l | x (x >= 1)."""
    l = 0
    while x % b == 0:
        x //= b
        l += 1
    return l


def floor_log(value: float, b: int) -> int:
    """Largest l with b^l <= value (value >= 1)."""
    l, power = 0, b
    while power <= value:
        power *= b
        l += 1
    return l


def cover_end(x: int, l: int, b: int) -> int:
    """Smallest multiple of b^(l+1) strictly greater than x."""
    step = b ** (l + 1)
    return (x // step + 1) * step


@dataclass
class CoverMaps:
    """maps[(x, l)] = {color: first c-colored position in [x, end(x, l)]}."""

    maps: Dict[Tuple[int, int], Dict[int, int]] = field(default_factory=dict)

    @property
    def entries(self) -> int:
        return sum(len(m) for m in self.maps.values())

    def lookup(self, x: int, l: int, c: int) -> Optional[int]:
        return self.maps.get((x, l), {}).get(c)


class PathInstance:
    """The leveled weighted path with prefix sums; `reversed` is its mirror image."""

    def __init__(self, colors: Sequence[int], b: int, *, _mirror: bool = False):
        if b < 2:
            raise InvalidBase(f"base must be >= 2, got {b}", operation="build_instance")
        self.b = b
        self.levels = 1
        while b**self.levels < len(colors):
            self.levels += 1
        self.n = b**self.levels
        # colors[0] is unused so positions are 1-based.
        self.colors: List[int] = [PADDING_COLOR] + list(colors)
        self.colors += [PADDING_COLOR] * (self.n + 1 - len(self.colors))
        self.original_length = len(colors)
        self.present = {c for c in self.colors if c != PADDING_COLOR}
        self.weights = [0] + [b ** largest_power_dividing(x, b) for x in range(1, self.n)]
        self.prefix = np.zeros(self.n + 1, dtype=np.int64)
        self.prefix[2:] = np.cumsum(self.weights[1:])
        self.maps = self._build_maps()
        self.reversed: Optional["PathInstance"] = None
        if not _mirror:
            mirrored = list(reversed(self.colors[1:]))
            self.reversed = PathInstance(mirrored, b, _mirror=True)
            self.reversed.reversed = self

    def weight(self, x: int) -> int:
        """Weight of edge (v_x, v_{x+1})."""
        return self.weights[x]

    def distance(self, i: int, j: int) -> int:
        return int(abs(self.prefix[j] - self.prefix[i]))

    @property
    def total_weight(self) -> int:
        return int(self.prefix[self.n])

    def positions_of(self, c: int) -> List[int]:
        return [x for x in range(1, self.n + 1) if self.colors[x] == c]

    def mirror(self, x: int) -> int:
        return self.n + 1 - x

    def _build_maps(self) -> CoverMaps:
        cover = CoverMaps()
        b, n = self.b, self.n
        for l in range(self.levels + 1):
            step = b**l
            for x in range(step, n + 1, step):
                end = min(cover_end(x, l, b), n)
                first: Dict[int, int] = {}
                for j in range(x, end + 1):
                    c = self.colors[j]
                    if c != PADDING_COLOR and c not in first:
                        first[c] = j
                cover.maps[(x, l)] = first
        return cover

    def forward_candidate(
        self, i: int, c: int, estimate: float, mode: "Mode", window: int
    ) -> Optional[int]:
        """First c-colored position >= i found in the level window picked by `estimate`."""
        if self.colors[i] == c:
            return i
        if estimate < 1:
            return None
        l = floor_log(estimate, self.b)
        top = min(self.levels, l + 1)
        bottom = 0 if mode is Mode.EXACT else max(0, l - window)
        found = [
            j
            for level in range(bottom, top + 1)
            if (j := self.maps.lookup(iota(i, level, self.b), level, c)) is not None
        ]
        return min(found) if found else None


def build_instance(colors: Sequence[int], b: int) -> Tuple[PathInstance, CoverMaps]:
    """Pad to a power of b and build weights, prefix sums, mirror and cover maps."""
    inst = PathInstance(colors, b)
    logger.info(
        "path instance: n=%d b=%d levels=%d map entries=%d",
        inst.n,
        b,
        inst.levels,
        inst.maps.entries,
    )
    return inst, inst.maps


def exact_query(
    inst: PathInstance,
    maps: CoverMaps,
    i: int,
    c: int,
    estimate: float,
    mode: Mode = Mode.FAST,
    window: int = DEFAULT_WINDOW,
) -> int:
    """
    Exact nearest c-colored position to i, given dist(i, c) <= estimate <= b * dist(i, c).

    Runs the forward lookup on `inst` and on its mirror, then keeps the closer
    answer (smaller position on ties).

    Raises:
        NoSuchColor: c never occurs on the path
        ContractViolation: neither direction produced a candidate
    """
    if maps is not inst.maps:
        raise OracleError("cover maps do not belong to this instance", operation="exact_query")
    mode = Mode(mode)
    if c not in inst.present:
        raise NoSuchColor("color does not occur on the path", color=c, operation="exact_query")
    candidates = []
    forward = inst.forward_candidate(i, c, estimate, mode, window)
    if forward is not None:
        candidates.append(forward)
    backward = inst.reversed.forward_candidate(inst.mirror(i), c, estimate, mode, window)
    if backward is not None:
        candidates.append(inst.mirror(backward))
    if not candidates:
        raise ContractViolation(
            f"estimate {estimate} left no candidate", vertex=i, color=c, operation="exact_query"
        )
    return min(candidates, key=lambda j: (inst.distance(i, j), j))


def brute_nearest_position(inst: PathInstance, i: int, c: int) -> Tuple[int, int]:
    """(distance, position) of the nearest c-colored position by linear scan."""
    positions = inst.positions_of(c)
    if not positions:
        raise NoSuchColor("color does not occur on the path", color=c)
    return min((inst.distance(i, j), j) for j in positions)


def expand_unweighted(inst: PathInstance) -> Graph:
    """
    Replace every edge of weight w by a path through w - 1 dummy vertices.

    Position x becomes vertex x - 1; dummies are numbered after the n positions.
    """
    edges = []
    next_id = inst.n
    for x in range(1, inst.n):
        w = inst.weight(x)
        chain = [x - 1] + list(range(next_id, next_id + w - 1)) + [x]
        next_id += w - 1
        edges.extend((a, b, 1) for a, b in zip(chain, chain[1:]))
    return Graph(next_id, tuple(edges))


EstimateSource = Callable[[int, int], float]


def rank_query_demo(
    sequence: Sequence[Hashable],
    i: int,
    symbol: Hashable,
    oracle: Optional[EstimateSource] = None,
    *,
    b: int = 2,
) -> int:
    """
    Occurrences of `symbol` in sequence[1, i) through nearest colored positions.

    Each position stores how many equal symbols precede it. The nearest
    occurrence j of the symbol is either the last one before i or the first one
    at/after i, so the rank is stored(j) + 1 or stored(j) respectively.

    Args:
        sequence: Symbols, position 1 is sequence[0]
        i: 1-based position in [1, len(sequence) + 1]; len + 1 counts the whole sequence
        symbol: Symbol to count
        oracle: Estimate source (position, color) -> estimate within [dist, b * dist];
            defaults to the exact distance
        b: Interval base

    Returns:
        Count of `symbol` in positions 1..i-1

    Raises:
        InvalidVertex: i outside [1, len(sequence) + 1]
    """
    if not (1 <= i <= len(sequence) + 1):
        raise InvalidVertex(
            f"position outside [1, {len(sequence) + 1}]", vertex=i, operation="rank_query_demo"
        )
    alphabet = {s: idx for idx, s in enumerate(sorted(set(sequence), key=repr))}
    if symbol not in alphabet:
        return 0
    colors = [alphabet[s] for s in sequence]
    inst, maps = build_instance(colors, b)
    stored: List[int] = [0] * (inst.n + 1)
    seen: Dict[int, int] = {}
    for x in range(1, len(colors) + 1):
        stored[x] = seen.get(colors[x - 1], 0)
        seen[colors[x - 1]] = stored[x] + 1

    c = alphabet[symbol]
    if oracle is None:

        def oracle(pos: int, color: int) -> float:
            return brute_nearest_position(inst, pos, color)[0]

    # Past the end, the nearest occurrence from the last position is the last one.
    at = min(i, len(colors))
    j = exact_query(inst, maps, at, c, oracle(at, c), Mode.EXACT)
    return stored[j] if j >= i else stored[j] + 1
