import itertools

import numpy as np
import pytest

from color_oracle.exceptions import DimensionError, VariantError
from color_oracle.gadget import (
    SOURCE,
    GadgetVariant,
    build_gadget,
    compact_distance_check,
    compact_distances,
    direct_product,
    directed_reachability_check,
    is_gap_distance,
    process_pair,
)
from color_oracle.graph import UNREACHABLE, brute_nearest, components

IDENTITY = [[1, 0], [0, 1]]

# 5 x 6 example: row 0 holds colors 0, 1, 3, 5
SAMPLE_MATRIX = [
    [1, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 1, 0, 1, 1, 0],
]


def random_matrix(n1, n2, seed, density=0.4):
    rng = np.random.default_rng(seed)
    return [[int(x) for x in row] for row in rng.random((n1, n2)) < density]


def all_vectors(n):
    return list(itertools.product((0, 1), repeat=n))


def test_identity_tree_shape():
    gad = build_gadget(IDENTITY)
    assert gad.rows == ((0,), (1,))
    assert gad.vertex_count == 3
    graph, coloring = gad.to_graph()
    assert sorted(graph.edges) == [(0, 1, 1), (0, 2, 1)]
    assert coloring.color_of == (2, 0, 1)


def test_identity_products():
    gad = build_gadget(IDENTITY)
    assert process_pair(gad, (1, 0), (0, 1)) is False
    assert process_pair(gad, (1, 0), (1, 0)) is True
    assert gad.attached == [True, True]


def test_all_zero_matrix_has_no_colored_vertices():
    gad = build_gadget([[0, 0, 0], [0, 0, 0]])
    assert gad.rows == ((), ())
    assert gad.vertex_count == 1
    assert not any(process_pair(gad, u, v) for u in all_vectors(2) for v in all_vectors(3))


def test_sample_matrix_rows_and_tree_structure():
    gad = build_gadget(SAMPLE_MATRIX)
    assert gad.rows[0] == (0, 1, 3, 5)
    assert gad.vertex_count == 1 + sum(map(sum, SAMPLE_MATRIX))
    graph, coloring = gad.to_graph()
    assert len(graph.edges) == graph.n - 1
    assert len(components(graph)) == 1
    assert coloring.color_of[SOURCE] == gad.blank_color


@pytest.mark.parametrize("n1, n2, seed", [(1, 1, 0), (2, 3, 1), (3, 3, 2), (4, 4, 3)])
def test_process_pair_exhaustive(n1, n2, seed):
    matrix = random_matrix(n1, n2, seed)
    gad = build_gadget(matrix)
    before = gad.snapshot()
    for u in all_vectors(n1):
        for v in all_vectors(n2):
            assert process_pair(gad, u, v) == direct_product(matrix, u, v)
            assert gad.snapshot() == before


def test_tree_answers_match_connectivity_in_graph():
    gad = build_gadget(SAMPLE_MATRIX)
    u = (1, 0, 1, 0, 0)
    gad.attached = [bool(x) for x in u]
    graph, coloring = gad.to_graph()
    gad.attached = [True] * 5
    for j in range(6):
        reachable = brute_nearest(graph, coloring, SOURCE, j).distance is not UNREACHABLE
        v = tuple(int(i == j) for i in range(6))
        assert process_pair(gad, u, v) == reachable


def test_compact_identity_distances():
    gad = build_gadget(IDENTITY, GadgetVariant.COMPACT)
    assert gad.vertex_count == 1 + 2 + 2
    assert compact_distances(gad, (1, 0)) == [3, UNREACHABLE]
    assert compact_distance_check(gad, (1, 0), (1, 0)) is True
    assert compact_distance_check(gad, (1, 0), (0, 1)) is False
    assert compact_distances(gad, (0, 0)) == [UNREACHABLE, UNREACHABLE]
    assert compact_distance_check(gad, (0, 0), (1, 1)) is False


@pytest.mark.parametrize("seed", range(3))
def test_compact_variants_exhaustive(seed):
    matrix = random_matrix(4, 4, seed, density=0.5)
    compact = build_gadget(matrix, GadgetVariant.COMPACT)
    directed = build_gadget(matrix, GadgetVariant.COMPACT_DIRECTED)
    for u in all_vectors(4):
        assert all(is_gap_distance(d) for d in compact_distances(compact, u))
        for v in all_vectors(4):
            expected = direct_product(matrix, u, v)
            assert compact_distance_check(compact, u, v) == expected
            assert directed_reachability_check(directed, u, v) == expected
    assert compact.attached == [True] * 4
    assert directed.attached == [True] * 4


def test_compact_shared_column_gives_distance_five():
    # rows 0 and 1 share column 0; only row 0 is attached
    gad = build_gadget([[1, 0], [1, 1]], GadgetVariant.COMPACT)
    assert compact_distances(gad, (1, 0)) == [3, 5]
    assert compact_distance_check(gad, (1, 0), (0, 1)) is False


def test_gap_distance_values():
    assert is_gap_distance(3)
    assert is_gap_distance(5)
    assert is_gap_distance(UNREACHABLE)
    assert not is_gap_distance(4)


def test_directed_graph_shape():
    gad = build_gadget(IDENTITY, GadgetVariant.COMPACT_DIRECTED)
    digraph = gad.to_digraph()
    assert sorted(digraph.edges) == [(0, 1), (0, 2), (1, 3), (2, 4)]


def test_errors():
    with pytest.raises(DimensionError):
        build_gadget([])
    with pytest.raises(DimensionError):
        build_gadget([[1, 0], [1]])
    gad = build_gadget(IDENTITY)
    with pytest.raises(DimensionError):
        process_pair(gad, (1,), (1, 0))
    with pytest.raises(VariantError):
        compact_distance_check(gad, (1, 0), (1, 0))
    with pytest.raises(VariantError):
        directed_reachability_check(gad, (1, 0), (1, 0))
    with pytest.raises(VariantError):
        compact_distances(build_gadget(IDENTITY, GadgetVariant.COMPACT_DIRECTED), (1, 0))


@pytest.mark.slow
def test_process_pair_exhaustive_8x8():
    matrix = random_matrix(8, 8, 42)
    gad = build_gadget(matrix)
    for u in all_vectors(8):
        for v in all_vectors(8):
            assert process_pair(gad, u, v) == direct_product(matrix, u, v)


@pytest.mark.slow
def test_compact_exhaustive_6x6():
    matrix = random_matrix(6, 6, 7)
    gad = build_gadget(matrix, GadgetVariant.COMPACT)
    for u in all_vectors(6):
        for v in all_vectors(6):
            assert compact_distance_check(gad, u, v) == direct_product(matrix, u, v)


def all_matrices(n1, n2):
    for bits in itertools.product((0, 1), repeat=n1 * n2):
        yield [list(bits[i * n2 : (i + 1) * n2]) for i in range(n1)]


def check_all_vector_pairs(matrix, variants):
    n1, n2 = len(matrix), len(matrix[0])
    gadgets = {variant: build_gadget(matrix, variant) for variant in variants}
    for u in all_vectors(n1):
        for v in all_vectors(n2):
            expected = direct_product(matrix, u, v)
            if GadgetVariant.TREE in gadgets:
                assert process_pair(gadgets[GadgetVariant.TREE], u, v) == expected
            if GadgetVariant.COMPACT in gadgets:
                assert compact_distance_check(gadgets[GadgetVariant.COMPACT], u, v) == expected
            if GadgetVariant.COMPACT_DIRECTED in gadgets:
                directed = gadgets[GadgetVariant.COMPACT_DIRECTED]
                assert directed_reachability_check(directed, u, v) == expected
        if GadgetVariant.COMPACT in gadgets:
            assert all(map(is_gap_distance, compact_distances(gadgets[GadgetVariant.COMPACT], u)))
    for gad in gadgets.values():
        assert gad.attached == [True] * n1


SMALL_SHAPES = [(n1, n2) for n1 in (1, 2, 3) for n2 in (1, 2, 3)]


@pytest.mark.parametrize("n1, n2", SMALL_SHAPES)
def test_every_small_matrix(n1, n2):
    for matrix in all_matrices(n1, n2):
        check_all_vector_pairs(matrix, [GadgetVariant.TREE])


@pytest.mark.slow
@pytest.mark.parametrize("n1, n2", SMALL_SHAPES)
def test_every_small_matrix_all_variants(n1, n2):
    for matrix in all_matrices(n1, n2):
        check_all_vector_pairs(matrix, list(GadgetVariant))


@pytest.mark.slow
@pytest.mark.parametrize("n1, n2", [(4, 1), (4, 2), (4, 3), (1, 4), (2, 4), (3, 4)])
def test_every_matrix_with_four_rows_or_columns(n1, n2):
    for matrix in all_matrices(n1, n2):
        check_all_vector_pairs(matrix, [GadgetVariant.TREE])


@pytest.mark.slow
@pytest.mark.parametrize("first_row", all_vectors(4))
def test_every_4x4_matrix(first_row):
    for rest in itertools.product(all_vectors(4), repeat=3):
        matrix = [list(first_row)] + [list(row) for row in rest]
        check_all_vector_pairs(matrix, [GadgetVariant.TREE])


def random_sweep(instances, max_side, seed, compact_every):
    rng = np.random.default_rng(seed)
    for trial in range(instances):
        n1, n2 = (int(x) for x in rng.integers(1, max_side + 1, size=2))
        matrix = random_matrix(n1, n2, seed=int(rng.integers(2**31)), density=rng.uniform(0.02, 0.6))
        u = tuple(int(x) for x in rng.integers(0, 2, n1))
        v = tuple(int(x) for x in rng.integers(0, 2, n2))
        expected = direct_product(matrix, u, v)
        assert process_pair(build_gadget(matrix), u, v) == expected
        directed = build_gadget(matrix, GadgetVariant.COMPACT_DIRECTED)
        assert directed_reachability_check(directed, u, v) == expected
        if trial % compact_every == 0:
            compact = build_gadget(matrix, GadgetVariant.COMPACT)
            assert compact_distance_check(compact, u, v) == expected
            assert all(map(is_gap_distance, compact_distances(compact, u)))


def test_random_instances():
    random_sweep(instances=300, max_side=12, seed=0, compact_every=10)


@pytest.mark.slow
def test_random_instances_up_to_32x32():
    random_sweep(instances=10_000, max_side=32, seed=1, compact_every=10)
