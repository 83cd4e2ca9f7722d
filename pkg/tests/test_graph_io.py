import pytest

from color_oracle.exceptions import ParseError, RangeError
from color_oracle.graph import Coloring, Graph
from color_oracle.graph_io import (
    WorkloadOp,
    load_graph,
    load_matrix,
    load_sequence,
    load_workload,
    write_graph,
)

from conftest import random_instance


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


def test_load_two_vertex_graph(write):
    path = write("k2.txt", "g 2 1 2\ne 0 1 3\nc 0 0\nc 1 1\n")
    graph, coloring = load_graph(path)
    assert graph == Graph(2, ((0, 1, 3),))
    assert coloring == Coloring(2, (0, 1))


def test_comments_and_blank_lines_are_ignored(write):
    path = write("g.txt", "# header next\ng 2 1 1\n\ne 0 1 1  # edge\nc 1 0\nc 0 0\n")
    graph, coloring = load_graph(path)
    assert graph.edges == ((0, 1, 1),)
    assert coloring.color_of == (0, 0)


def test_write_then_load_reproduces_instance(tmp_path):
    graph, coloring = random_instance(25, 4, seed=2)
    path = tmp_path / "inst.txt"
    write_graph(path, graph, coloring)
    assert load_graph(path) == (graph, coloring)


@pytest.mark.parametrize(
    "text, line",
    [
        ("g 2 1 2\ne 0 1 3\nc 0 0\n", 3),  # vertex 1 has no color line
        ("e 0 1 3\n", 1),  # no header
        ("g 2 1 2\ne 0 1\nc 0 0\nc 1 1\n", 2),  # short edge line
        ("g 2 1 2\ne 0 1 x\nc 0 0\nc 1 1\n", 2),  # non-integer
        ("g 2 2 2\ne 0 1 3\nc 0 0\nc 1 1\n", 4),  # edge count mismatch
        ("g 2 1 2\ne 0 1 0\nc 0 0\nc 1 1\n", 2),  # zero weight
        ("g 2 1 2\ne 0 1 3\nc 0 0\nc 0 1\n", 4),  # colored twice
        ("g 2 1 2\nx 0 1\n", 2),  # unknown tag
    ],
)
def test_parse_errors_carry_line_numbers(write, text, line):
    with pytest.raises(ParseError) as info:
        load_graph(write("bad.txt", text))
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}: ")


def test_range_errors(write):
    with pytest.raises(RangeError):
        load_graph(write("a.txt", "g 2 1 2\ne 0 1 3\nc 0 0\nc 1 2\n"))
    with pytest.raises(RangeError):
        load_graph(write("b.txt", "g 2 1 2\ne 0 2 3\nc 0 0\nc 1 1\n"))


def test_workload(write):
    graph, coloring = Graph(2, ((0, 1, 1),)), Coloring(2, (0, 1))
    ops = load_workload(write("w.txt", "q 0 1\nr 1 0\n# again\nq 0 0\n"), graph, coloring)
    assert ops == [WorkloadOp("q", 0, 1), WorkloadOp("r", 1, 0), WorkloadOp("q", 0, 0)]
    with pytest.raises(RangeError):
        load_workload(write("w2.txt", "q 0 2\n"), graph, coloring)
    with pytest.raises(ParseError):
        load_workload(write("w3.txt", "d 0 1\n"), graph, coloring)


def test_sequence_and_matrix(write):
    assert load_sequence(write("s.txt", "0 1 2\n# more\n1 0\n")) == [0, 1, 2, 1, 0]
    assert load_matrix(write("m.txt", "0110\n1 0 0 1\n")) == [[0, 1, 1, 0], [1, 0, 0, 1]]
    with pytest.raises(ParseError):
        load_matrix(write("m2.txt", "01\n011\n"))
    with pytest.raises(ParseError):
        load_matrix(write("m3.txt", "012\n"))
    with pytest.raises(ParseError):
        load_sequence(write("s2.txt", "# nothing\n"))
    with pytest.raises(RangeError):
        load_sequence(write("s3.txt", "0 -1\n"))
