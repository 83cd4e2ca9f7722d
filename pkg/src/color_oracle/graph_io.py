"""Line-oriented text formats: graphs, workloads, color sequences and 0/1 matrices.

All formats are whitespace-separated with '#' comments and blank lines ignored.

Graph file:
    g <n> <m> <sigma>
    e <u> <v> <w>        (m lines)
    c <v> <color>        (n lines, one per vertex)

Workload file:
    q <v> <color>        query
    r <v> <color>        recolor (dynamic variants only)
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Literal, Optional, Tuple, Union

from color_oracle.exceptions import ParseError, RangeError
from color_oracle.graph import Coloring, Graph

PathLike = Union[str, Path]


@dataclass(frozen=True)
class WorkloadOp:
    kind: Literal["q", "r"]
    vertex: int
    color: int


def _lines(path: PathLike) -> Iterator[Tuple[int, List[str]]]:
    with open(path, "r") as f:
        for number, raw in enumerate(f, 1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield number, text.split()


def _ints(fields: List[str], count: int, number: int) -> List[int]:
    if len(fields) != count + 1:
        raise ParseError(f"expected {count} values after '{fields[0]}'", number)
    try:
        return [int(x) for x in fields[1:]]
    except ValueError:
        raise ParseError(f"non-integer value in '{' '.join(fields)}'", number) from None


def load_graph(path: PathLike) -> Tuple[Graph, Coloring]:
    """
    Load a graph file.

    Raises:
        ParseError: malformed or missing lines (with line number)
        RangeError: vertex or color id out of range
    """
    header: Optional[Tuple[int, int, int]] = None
    edges: List[Tuple[int, int, int]] = []
    colors: dict = {}
    last = 0
    for number, fields in _lines(path):
        last = number
        tag = fields[0]
        if header is None:
            if tag != "g":
                raise ParseError("file must start with a 'g <n> <m> <sigma>' header", number)
            n, m, sigma = _ints(fields, 3, number)
            if n < 0 or m < 0 or sigma < 1:
                raise ParseError("header values out of range", number)
            header = (n, m, sigma)
            continue
        n, m, sigma = header
        if tag == "e":
            u, v, w = _ints(fields, 3, number)
            if not (0 <= u < n and 0 <= v < n):
                raise RangeError(f"edge endpoint outside [0, {n})", number)
            if w < 1:
                raise ParseError(f"edge weight must be positive, got {w}", number)
            edges.append((u, v, w))
        elif tag == "c":
            v, c = _ints(fields, 2, number)
            if not (0 <= v < n):
                raise RangeError(f"vertex outside [0, {n})", number)
            if not (0 <= c < sigma):
                raise RangeError(f"color {c} outside [0, {sigma})", number)
            if v in colors:
                raise ParseError(f"vertex {v} colored twice", number)
            colors[v] = c
        else:
            raise ParseError(f"unknown line tag '{tag}'", number)
    if header is None:
        raise ParseError("empty graph file", last or None)
    n, m, sigma = header
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}", last)
    missing = [v for v in range(n) if v not in colors]
    if missing:
        raise ParseError(f"no color line for vertex {missing[0]}", last)
    return Graph(n, tuple(edges)), Coloring(sigma, tuple(colors[v] for v in range(n)))


def write_graph(path: PathLike, graph: Graph, coloring: Coloring) -> None:
    with open(path, "w") as f:
        f.write(f"g {graph.n} {len(graph.edges)} {coloring.sigma}\n")
        for u, v, w in graph.edges:
            f.write(f"e {u} {v} {w}\n")
        for v, c in enumerate(coloring.color_of):
            f.write(f"c {v} {c}\n")


def load_workload(path: PathLike, graph: Graph, coloring: Coloring) -> List[WorkloadOp]:
    ops: List[WorkloadOp] = []
    for number, fields in _lines(path):
        tag = fields[0]
        if tag not in ("q", "r"):
            raise ParseError(f"unknown workload tag '{tag}'", number)
        v, c = _ints(fields, 2, number)
        if not (0 <= v < graph.n):
            raise RangeError(f"vertex outside [0, {graph.n})", number)
        if not (0 <= c < coloring.sigma):
            raise RangeError(f"color {c} outside [0, {coloring.sigma})", number)
        ops.append(WorkloadOp(tag, v, c))
    return ops


def load_sequence(path: PathLike) -> List[int]:
    """Color ids, whitespace-separated across any number of lines."""
    values: List[int] = []
    for number, fields in _lines(path):
        for token in fields:
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"non-integer color '{token}'", number) from None
            if value < 0:
                raise RangeError(f"negative color {value}", number)
            values.append(value)
    if not values:
        raise ParseError("empty sequence file")
    return values


def load_matrix(path: PathLike) -> List[List[int]]:
    """Rows of 0/1, either as '0110' strings or whitespace-separated bits."""
    rows: List[List[int]] = []
    for number, fields in _lines(path):
        bits = "".join(fields)
        if set(bits) - {"0", "1"}:
            raise ParseError("matrix rows may only contain 0 and 1", number)
        row = [int(b) for b in bits]
        if rows and len(row) != len(rows[0]):
            raise ParseError(f"row has {len(row)} columns, expected {len(rows[0])}", number)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix file")
    return rows
