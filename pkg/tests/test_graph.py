import io
import math
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpctri.graph import (
    Graph,
    GraphError,
    ParseError,
    alpha_interval,
    degeneracy,
    degree_vector,
    gen_forest_union,
    gen_gnm,
    is_acyclic,
    load_edge_list,
    min_degree_endpoint_sum,
    prufer_to_tree,
    relabel_dense,
)


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    return Graph.from_edges(draw(st.lists(pairs, max_size=3 * n)), n=n)


def star(leaves):
    return Graph.from_edges([(0, i) for i in range(1, leaves + 1)])


def complete(n):
    return Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], n=n)


def test_load_triangle():
    g = load_edge_list("0 1\n1 2\n0 2")
    assert g == Graph(3, ((0, 1), (0, 2), (1, 2)))


def test_load_collapses_orientation_and_duplicates():
    assert load_edge_list("1 0\n0 1") == Graph(2, ((0, 1),))


def test_load_header_and_comments():
    g = load_edge_list("# n = 6\n# a comment\n\n0 1\n")
    assert g.n == 6 and g.edges == ((0, 1),)


def test_load_explicit_n_out_of_range():
    with pytest.raises(GraphError):
        load_edge_list("0 5\n", n=3)


@pytest.mark.parametrize(
    "text, lineno",
    [("0 1\nx 2\n", 2), ("0 1\n1 2\n3 3\n", 3), ("-1 2\n", 1), ("0 1 2\n", 1)],
)
def test_load_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ParseError) as info:
        load_edge_list(text)
    assert info.value.lineno == lineno


def test_load_random_file_matches_set_dedup():
    rng = random.Random(3)
    pairs = [(rng.randrange(300), rng.randrange(300)) for _ in range(6100)]
    pairs = [p for p in pairs if p[0] != p[1]]
    lines = pairs + [(v, u) for u, v in pairs[:4000]]
    rng.shuffle(lines)
    assert len(lines) >= 10_000
    text = io.StringIO("".join(f"{u} {v}\n" for u, v in lines))
    expected = {(min(p), max(p)) for p in pairs}
    assert set(load_edge_list(text).edges) == expected


def test_graph_rejects_noncanonical():
    with pytest.raises(GraphError):
        Graph(3, ((1, 0),))
    with pytest.raises(GraphError):
        Graph(3, ((0, 2), (0, 1)))
    with pytest.raises(GraphError):
        Graph.from_edges([(2, 2)])


def test_round_trip_text():
    g = gen_gnm(20, 40, seed=1)
    assert load_edge_list(g.to_edge_list()) == g


def test_relabel_dense():
    g, old = relabel_dense(Graph.from_edges([(3, 7), (7, 9)], n=12))
    assert g == Graph(3, ((0, 1), (1, 2)))
    assert old == [3, 7, 9]


def test_degree_vector_examples():
    assert degree_vector(complete(3)).tolist() == [2, 2, 2]
    assert degree_vector(star(4)).tolist() == [4, 1, 1, 1, 1]


def test_degree_vector_random_tally():
    g = gen_gnm(100, 500, seed=5)
    tally = [0] * g.n
    for u, v in g.edges:
        tally[u] += 1
        tally[v] += 1
    assert degree_vector(g).tolist() == tally


def test_degeneracy_examples():
    assert degeneracy(star(5)) == 1
    assert degeneracy(gen_forest_union(40, 1, seed=2)) == 1
    assert degeneracy(complete(4)) == 3
    assert degeneracy(Graph(4, ())) == 0


def test_degeneracy_forest_union_window():
    g = gen_forest_union(50, 3, seed=0)
    d = degeneracy(g)
    assert 1 <= d <= 5
    assert d >= math.ceil(g.m / (g.n - 1))


@given(graphs())
def test_degeneracy_matches_core_number(g):
    nxg = nx.Graph(list(g.edges))
    nxg.add_nodes_from(range(g.n))
    ref = max(nx.core_number(nxg).values(), default=0)
    assert degeneracy(g) == ref


def test_min_degree_sum_examples():
    assert min_degree_endpoint_sum(complete(3)) == 6
    assert min_degree_endpoint_sum(star(4)) == 4


def test_min_degree_sum_forest_union():
    g = gen_forest_union(200, 4, seed=0)
    deg = g.adjacency()
    tally = sum(min(len(deg[u]), len(deg[v])) for u, v in g.edges)
    assert min_degree_endpoint_sum(g) == tally
    assert tally <= 2 * g.m * 4


def test_alpha_interval():
    assert alpha_interval(0) == (0, 0)
    assert alpha_interval(1) == (1, 1)
    assert alpha_interval(5) == (3, 5)


def test_prufer_known_tree():
    # sequence (3, 3, 3) on 5 vertices is the star centred at 3 plus vertex 4
    assert sorted(prufer_to_tree([3, 3, 3], 5)) == [(0, 3), (1, 3), (2, 3), (3, 4)]


def test_forest_union_examples():
    assert gen_forest_union(30, 0, seed=1).m == 0
    assert is_acyclic(gen_forest_union(100, 1, seed=4))
    assert gen_forest_union(100, 1, seed=4).m == 99
    assert degeneracy(gen_forest_union(100, 3, seed=7)) <= 5


def test_forest_union_deterministic():
    assert gen_forest_union(80, 3, seed=9) == gen_forest_union(80, 3, seed=9)


def test_gnm_examples():
    assert gen_gnm(10, 0, seed=0).m == 0
    assert gen_gnm(5, 10, seed=3) == complete(5)
    a, b = gen_gnm(30, 100, seed=1), gen_gnm(30, 100, seed=2)
    assert a.m == b.m == 100
    assert set(a.edges) != set(b.edges)


def test_gnm_out_of_range():
    with pytest.raises(GraphError):
        gen_gnm(5, 11)
    with pytest.raises(GraphError):
        gen_gnm(5, -1)


@given(graphs())
def test_degree_sum_is_twice_m(g):
    assert int(degree_vector(g).sum()) == 2 * g.m


@given(graphs())
def test_min_degree_sum_within_degeneracy_bound(g):
    assert min_degree_endpoint_sum(g) <= 2 * g.m * degeneracy(g)


@given(st.integers(1, 60), st.integers(0, 4), st.integers(0, 10_000))
def test_forest_union_degeneracy_bound(n, k, seed):
    g = gen_forest_union(n, k, seed)
    assert degeneracy(g) <= max(2 * k - 1, 0)
    assert min_degree_endpoint_sum(g) <= 2 * g.m * k


@given(st.integers(2, 25), st.data())
def test_gnm_is_valid(n, data):
    m = data.draw(st.integers(0, n * (n - 1) // 2))
    g = gen_gnm(n, m, data.draw(st.integers(0, 999)))
    assert g.m == m
    assert all(0 <= u < v < n for u, v in g.edges)
