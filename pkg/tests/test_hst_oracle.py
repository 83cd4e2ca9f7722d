import numpy as np
import pytest

from color_oracle.exceptions import (
    DisconnectedInput,
    InvalidDistortion,
    InvalidK,
    InvalidVertex,
    NoSuchColor,
    NoSuchColorInComponent,
    NoSuchColorInTree,
    VariantError,
)
from color_oracle import hst_oracle
from color_oracle.graph import (
    Coloring,
    Graph,
    components,
    disjoint_union,
    distance_matrix,
    random_connected_graph,
)
from color_oracle.hst_oracle import (
    ColoredAncestorIndex,
    Hst,
    HstOracle,
    Variant,
    anchored_hst,
    build_cover,
    shifted_clustering_hst,
    ultra_dist,
)

from conftest import exact_color_distances, random_instance

VARIANTS = [Variant.FAST_QUERY, Variant.FAST_UPDATE]


def brute_colored_ancestor(tree, v, colored):
    node = tree.leaf_of[v]
    while True:
        if any(u in colored for u in tree.leaves_under(node)):
            return node
        if tree.parent[node] == node:
            return None
        node = tree.parent[node]


def check_estimates(oracle, dist, vertices=None):
    exact = exact_color_distances(oracle.graph, oracle.coloring)
    for v in range(oracle.graph.n) if vertices is None else vertices:
        part = next(p for p in components(oracle.graph) if v in p)
        for c in sorted({oracle.coloring.color_of[u] for u in part}):
            d = int(exact[v, c])
            result = oracle.query(v, c)
            assert d <= result.estimate <= oracle.distortion * d
            assert oracle.coloring.color_of[result.witness] == c
            assert dist[v, result.witness] <= result.estimate


@pytest.fixture
def instance():
    graph, coloring = random_instance(30, 5, seed=13)
    return graph, coloring, distance_matrix(graph)


# -- single trees ----------------------------------------------------------


def test_shifted_clustering_labels_are_diameters(instance):
    graph, _, dist = instance
    tree = shifted_clustering_hst(list(range(graph.n)), dist, np.random.default_rng(0))
    assert tree.vertices == list(range(graph.n))
    for node, parent in enumerate(tree.parent):
        if node != parent:
            assert tree.delta[node] < tree.delta[parent]
        leaves = tree.leaves_under(node)
        if len(leaves) > 1:
            assert tree.delta[node] == dist[np.ix_(leaves, leaves)].max()


def test_trees_dominate_the_metric(instance):
    graph, _, dist = instance
    rng = np.random.default_rng(1)
    for _ in range(3):
        tree = shifted_clustering_hst(list(range(graph.n)), dist, rng)
        rho = tree.ultrametric_matrix(list(range(graph.n)))
        assert (rho >= dist).all()
        assert ultra_dist(tree, 3, 7) == rho[3, 7]


def test_anchored_tree_has_distortion_two_at_center(instance):
    graph, _, dist = instance
    tree = anchored_hst(list(range(graph.n)), dist, 4)
    for u in range(graph.n):
        assert dist[4, u] <= ultra_dist(tree, 4, u) <= 2 * dist[4, u]


def test_single_vertex_tree():
    dist = np.zeros((1, 1))
    tree = shifted_clustering_hst([0], dist, np.random.default_rng(0))
    assert len(tree) == 1
    assert tree.delta == [0]


def test_leaf_numbering_gives_contiguous_subtrees(instance):
    graph, _, dist = instance
    tree = shifted_clustering_hst(list(range(graph.n)), dist, np.random.default_rng(2))
    index = ColoredAncestorIndex(tree, 1)
    assert sorted(index.lam.values()) == list(range(graph.n))
    for node in range(len(tree)):
        numbers = sorted(index.lam[v] for v in tree.leaves_under(node))
        assert numbers == list(range(numbers[0], numbers[-1] + 1))


# -- covers ----------------------------------------------------------------


@pytest.mark.parametrize("factor", [128, 16])
def test_cover_home_guarantee(instance, factor):
    graph, _, dist = instance
    k = 2
    cover = build_cover(graph, k, factor * k, seed=3, distances=dist)
    assert set(cover.home) == set(range(graph.n))
    assert cover.verify(dist) == []
    for v in range(graph.n):
        tree = cover.trees[cover.home[v]]
        for u in range(graph.n):
            assert dist[v, u] <= ultra_dist(tree, v, u) <= factor * k * dist[v, u]


def test_cover_with_tight_distortion_falls_back_to_anchored_trees(instance):
    graph, _, dist = instance
    cover = build_cover(graph, 3, 2, seed=0, distances=dist, attempt_budget=1)
    assert set(cover.home) == set(range(graph.n))
    assert cover.verify(dist) == []


def test_cover_epsilon():
    graph = Graph(2, ((0, 1, 1),))
    cover = build_cover(graph, 2, 8 * 1.5 * 2)
    assert cover.epsilon == pytest.approx(0.5)


def test_cover_errors():
    graph = Graph(3, ((0, 1, 1),))
    with pytest.raises(InvalidK):
        build_cover(graph, 0)
    with pytest.raises(InvalidDistortion):
        build_cover(graph, 2, 0.5)
    with pytest.raises(DisconnectedInput):
        build_cover(graph, 2)
    assert build_cover(graph, 2, vertices=[0, 1]).vertices == [0, 1]


# -- oracle ----------------------------------------------------------------


@pytest.mark.parametrize("variant", VARIANTS)
def test_static_queries_within_distortion(instance, variant):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=variant, seed=1, distances=dist)
    check_estimates(oracle, dist)


@pytest.mark.parametrize("variant", VARIANTS)
def test_nearest_colored_ancestor_matches_tree_walk(instance, variant):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=variant, seed=2, distances=dist)
    cover = oracle.covers[0]
    for t, tree in enumerate(cover.trees):
        for c in range(coloring.sigma):
            if variant is Variant.FAST_QUERY:
                colored = set(coloring.members[c])
            else:
                colored = {u for u in coloring.members[c] if cover.home[u] == t}
            if not colored:
                continue
            for v in range(graph.n):
                expected = brute_colored_ancestor(tree, v, colored)
                assert oracle.nearest_colored_ancestor(t, v, c) == expected


@pytest.mark.parametrize("variant", VARIANTS)
def test_recolor_workload(instance, variant):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=variant, seed=4, distances=dist)
    rng = np.random.default_rng(6)
    for step in range(120):
        v = int(rng.integers(graph.n))
        oracle.recolor(v, int(rng.integers(coloring.sigma)))
        check_estimates(oracle, dist, vertices=[v])
        if step % 40 == 39:
            check_estimates(oracle, dist)


def test_recolor_to_same_color_is_harmless(instance):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, seed=0, distances=dist)
    c = coloring.color_of[0]
    oracle.recolor(0, c)
    assert oracle.query(0, c).estimate == 0


def test_variants_build_the_same_cover(instance):
    graph, coloring, dist = instance
    fast_query = HstOracle(graph, coloring, 2, variant=Variant.FAST_QUERY, seed=5, distances=dist)
    fast_update = HstOracle(graph, coloring, 2, variant="dyn-fastupdate", seed=5, distances=dist)
    assert fast_query.tree_count == fast_update.tree_count
    assert fast_query.covers[0].home == fast_update.covers[0].home
    check_estimates(fast_update, dist)


def test_tiny_graphs():
    one = HstOracle(Graph(1), Coloring(1, (0,)), 1)
    assert one.query(0, 0).estimate == 0
    assert one.query(0, 0).witness == 0

    two = HstOracle(Graph(2, ((0, 1, 3),)), Coloring(2, (0, 1)), 2)
    result = two.query(0, 1)
    assert (result.estimate, result.witness) == (3, 1)
    two.recolor(1, 0)
    assert two.query(0, 0).estimate == 0
    with pytest.raises(NoSuchColor):
        two.query(0, 1)


def test_components_get_separate_covers():
    graph = disjoint_union([Graph(3, ((0, 1, 1), (1, 2, 2))), Graph(2, ((0, 1, 4),))])
    coloring = Coloring(3, (0, 1, 0, 2, 2))
    oracle = HstOracle(graph, coloring, 2, variant=Variant.FAST_UPDATE)
    assert len(oracle.covers) == 2
    assert oracle.query(4, 2).estimate == 0
    assert 1 <= oracle.query(0, 1).estimate <= 3
    with pytest.raises(NoSuchColorInComponent):
        oracle.query(0, 2)


def test_oracle_errors(instance):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, distances=dist)
    with pytest.raises(InvalidVertex):
        oracle.query(graph.n, 0)
    with pytest.raises(InvalidVertex):
        oracle.recolor(-1, 0)
    with pytest.raises(NoSuchColor):
        oracle.recolor(0, coloring.sigma)
    with pytest.raises(NoSuchColor):
        oracle.query(0, coloring.sigma)


@pytest.mark.slow
@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("seed", range(5))
def test_recolor_sweep(variant, seed):
    graph, coloring = random_instance(60, 8, seed=seed)
    dist = distance_matrix(graph)
    oracle = HstOracle(graph, coloring, 3, distortion=48, variant=variant, seed=seed, distances=dist)
    rng = np.random.default_rng(seed)
    for step in range(400):
        v = int(rng.integers(graph.n))
        oracle.recolor(v, int(rng.integers(coloring.sigma)))
        check_estimates(oracle, dist, vertices=[v])
        if step % 50 == 49:
            check_estimates(oracle, dist)


# -- ultrametric and index invariants --------------------------------------


def test_three_leaf_ultrametric():
    #      root (2)
    #     /        \
    #   node (1)    z
    #   /     \
    #  x       y
    tree = Hst(parent=[0, 0, 1, 1, 0], delta=[2, 1, 0, 0, 0], leaf_of={0: 2, 1: 3, 2: 4})
    assert ultra_dist(tree, 0, 1) == 1
    assert ultra_dist(tree, 0, 2) == 2
    assert ultra_dist(tree, 1, 2) == 2
    assert ultra_dist(tree, 0, 0) == 0


def test_strong_triangle_inequality(instance):
    graph, _, dist = instance
    rng = np.random.default_rng(8)
    trees = [shifted_clustering_hst(list(range(graph.n)), dist, rng) for _ in range(3)]
    trees.append(anchored_hst(list(range(graph.n)), dist, 0))
    for tree in trees:
        rho = tree.ultrametric_matrix(list(range(graph.n)))
        # through[x, y, z] = max(rho(x, y), rho(y, z))
        through = np.maximum(rho[:, :, None], rho[None, :, :])
        assert (rho[:, None, :] <= through).all()


def check_index_against_tree_walk(tree, index, colored_by_color):
    for c, colored in enumerate(colored_by_color):
        for v in tree.vertices:
            expected = brute_colored_ancestor(tree, v, colored)
            if expected is None:
                with pytest.raises(NoSuchColorInTree):
                    index.nearest(v, c)
                continue
            ancestor, witness = index.nearest(v, c)
            assert ancestor == expected
            assert witness in colored
            assert tree.lca.query(tree.leaf_of[v], tree.leaf_of[witness]) == expected


def recolor_random_trees(trials, seed):
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        n = int(rng.integers(2, 65))
        sigma = int(rng.integers(1, 6))
        graph = random_connected_graph(n, int(rng.integers(0, n)), max_weight=6, seed=trial)
        dist = distance_matrix(graph)
        tree = shifted_clustering_hst(list(range(n)), dist, rng)
        index = ColoredAncestorIndex(tree, sigma)
        colors = [int(c) for c in rng.integers(0, sigma, size=n)]
        for v, c in enumerate(colors):
            index.color(v, c)
        for _ in range(5):
            for v in rng.integers(0, n, size=int(rng.integers(1, n + 1))):
                v, c_new = int(v), int(rng.integers(sigma))
                index.uncolor(v, colors[v])
                index.color(v, c_new)
                colors[v] = c_new
            colored = [{v for v in range(n) if colors[v] == c} for c in range(sigma)]
            check_index_against_tree_walk(tree, index, colored)


def test_colored_ancestor_index_under_recolors():
    recolor_random_trees(trials=10, seed=0)


@pytest.mark.slow
def test_colored_ancestor_index_on_many_trees():
    recolor_random_trees(trials=100, seed=1)


def test_fast_update_minimum_never_exceeds_home_estimate(instance):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=Variant.FAST_QUERY, seed=7, distances=dist)
    rng = np.random.default_rng(7)
    for step in range(30):
        for v in range(graph.n):
            for c in sorted(set(oracle.coloring.color_of)):
                assert oracle.query_fast_update(v, c).estimate <= oracle.query_fast_query(v, c).estimate
        oracle.recolor(int(rng.integers(graph.n)), int(rng.integers(coloring.sigma)))


@pytest.mark.parametrize("variant", VARIANTS)
def test_key_sets_match_a_rebuild_after_recolors(instance, variant):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=variant, seed=9, distances=dist)
    rng = np.random.default_rng(9)
    for _ in range(200):
        oracle.recolor(int(rng.integers(graph.n)), int(rng.integers(coloring.sigma)))
    cover = oracle.covers[0]
    for t, (tree, index) in enumerate(zip(cover.trees, oracle.indexes[0])):
        fresh = ColoredAncestorIndex(tree, coloring.sigma)
        for v, c in enumerate(oracle.coloring.color_of):
            if variant is Variant.FAST_QUERY or cover.home[v] == t:
                fresh.color(v, c)
        assert [list(keys) for keys in index.keys] == [list(keys) for keys in fresh.keys]


def test_recolor_and_query_reject_the_other_variant(instance):
    graph, coloring, dist = instance
    fast_query = HstOracle(graph, coloring, 2, variant=Variant.FAST_QUERY, distances=dist)
    fast_update = HstOracle(graph, coloring, 2, variant=Variant.FAST_UPDATE, distances=dist)
    with pytest.raises(VariantError):
        fast_query.recolor_fast_update(0, 1)
    with pytest.raises(VariantError):
        fast_update.recolor_fast_query(0, 1)
    with pytest.raises(VariantError):
        fast_update.query_fast_query(0, coloring.color_of[0])
    # rejected calls leave the coloring untouched
    assert fast_query.coloring == coloring
    assert fast_update.coloring == coloring


def test_recolor_does_not_rebuild_the_coloring(instance, monkeypatch):
    graph, coloring, dist = instance
    oracle = HstOracle(graph, coloring, 2, variant=Variant.FAST_UPDATE, seed=3, distances=dist)
    model = list(coloring.color_of)

    def rebuilt(*args, **kwargs):
        raise AssertionError("coloring rebuilt during a recolor")

    monkeypatch.setattr(hst_oracle, "Coloring", rebuilt)
    rng = np.random.default_rng(3)
    for _ in range(50):
        v, c = int(rng.integers(graph.n)), int(rng.integers(coloring.sigma))
        oracle.recolor(v, c)
        model[v] = c
        assert oracle.query(v, c).estimate == 0
    monkeypatch.undo()
    assert oracle.coloring.color_of == tuple(model)
    assert oracle.coloring is oracle.coloring
