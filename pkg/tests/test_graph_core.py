import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpfrac.errors import InvalidParameter, MalformedInput, NotConnected
from dpfrac.graph_core import (
    FractionalDPTwo,
    Graph,
    bfs_spanning_tree,
    classify_fractional_dp_two,
    cyclomatic_rank,
    degeneracy,
    from_edges,
    is_bipartite,
    make_complete_bipartite,
    make_cycle,
    make_path,
    parse_graph,
)

from conftest import random_connected_graph
import oracles


def test_cycle_generator():
    tri = make_cycle(3)
    assert tri.n == 3 and tri.n_edges == 3
    assert all(tri.degree(v) == 2 for v in range(3))
    c5 = make_cycle(5)
    assert c5.n_edges == 5 and not is_bipartite(c5)
    assert [c5.label(v) for v in range(5)] == ["v1", "v2", "v3", "v4", "v5"]
    with pytest.raises(InvalidParameter):
        make_cycle(2)


def test_complete_bipartite_generator():
    g = make_complete_bipartite(2, 3)
    assert (g.n, g.n_edges) == (5, 6)
    assert g.parts == ((0, 1), (2, 3, 4))
    assert make_complete_bipartite(1, 1).edges == ((0, 1),)
    k22 = make_complete_bipartite(2, 2)
    assert k22.n_edges == 4 and all(k22.degree(v) == 2 for v in range(4))
    for bad in [(0, 3), (2, 0)]:
        with pytest.raises(InvalidParameter):
            make_complete_bipartite(*bad)


def test_k22_is_c4():
    k22, c4 = make_complete_bipartite(2, 2), make_cycle(4)
    assert oracles.isomorphic(k22.n, k22.edges, c4.n, c4.edges)
    assert not oracles.isomorphic(k22.n, k22.edges, 4, make_path(4).edges + ((0, 2),))


def test_graph_rejects_loops_and_duplicates():
    with pytest.raises(InvalidParameter):
        from_edges(3, [(0, 0)])
    with pytest.raises(InvalidParameter):
        from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidParameter):
        from_edges(3, [(0, 5)])


def test_classification_examples():
    assert classify_fractional_dp_two(make_path(4)) is FractionalDPTwo.AT_MOST_TWO_ATTAINED
    assert classify_fractional_dp_two(make_cycle(4)) is FractionalDPTwo.EXACTLY_TWO_NOT_ATTAINED
    assert classify_fractional_dp_two(make_complete_bipartite(2, 3)) is FractionalDPTwo.GREATER_THAN_TWO
    assert classify_fractional_dp_two(make_cycle(5)) is FractionalDPTwo.GREATER_THAN_TWO
    with pytest.raises(NotConnected):
        classify_fractional_dp_two(from_edges(4, [(0, 1), (2, 3)]))


def _classify_by_cycles(g):
    lengths = oracles.simple_cycles(g.n, g.edges)
    if any(x % 2 for x in lengths):
        return FractionalDPTwo.GREATER_THAN_TWO
    return {0: FractionalDPTwo.AT_MOST_TWO_ATTAINED, 1: FractionalDPTwo.EXACTLY_TWO_NOT_ATTAINED}.get(
        len(lengths), FractionalDPTwo.GREATER_THAN_TWO)


def test_classification_matches_cycle_enumeration():
    rng = random.Random(5)
    for _ in range(150):
        n = rng.randint(1, 6)
        g = random_connected_graph(rng, n, rng.choice([0.3, 0.5, 0.7]))
        assert classify_fractional_dp_two(g) == _classify_by_cycles(g), g.edges


def test_classification_invariant_under_relabeling():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(2, 7)
        g = random_connected_graph(rng, n, 0.4)
        perm = list(range(n))
        rng.shuffle(perm)
        h = from_edges(n, [(perm[u], perm[v]) for u, v in g.edges])
        assert classify_fractional_dp_two(g) == classify_fractional_dp_two(h)


def test_degeneracy_examples():
    assert degeneracy(make_complete_bipartite(2, 3)) == 2
    assert degeneracy(make_cycle(7)) == 2
    assert degeneracy(make_path(6)) == 1


@pytest.mark.parametrize("n", range(1, 7))
def test_degeneracy_of_complete_bipartite(n):
    for m in range(n, 7):
        g = make_complete_bipartite(n, m)
        assert degeneracy(g) == min(n, m)
        if n + m <= 8:
            assert oracles.degeneracy(g.n, g.edges) == min(n, m)


def test_degeneracy_matches_bruteforce():
    rng = random.Random(3)
    for _ in range(60):
        g = random_connected_graph(rng, rng.randint(1, 7), 0.5)
        assert degeneracy(g) == oracles.degeneracy(g.n, g.edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.data())
def test_spanning_tree_and_rank(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                               .filter(lambda e: e[0] != e[1]).map(lambda e: (min(e), max(e))),
                               unique=True, max_size=12))
    g = from_edges(n, edges)
    tree = bfs_spanning_tree(g)
    comps = n - len(tree)
    assert cyclomatic_rank(g) == g.n_edges - n + comps
    assert set(tree) <= set(g.edges)


def test_json_round_trip_and_pointers(tmp_path):
    g = make_complete_bipartite(2, 3)
    assert Graph.from_json(json.loads(json.dumps(g.to_json()))) == g
    with pytest.raises(MalformedInput) as exc:
        Graph.from_json({"n": 3, "edges": [[0, 1], [1, "x"]]})
    assert exc.value.pointer.startswith("$.edges[1]")
    p = tmp_path / "g.json"
    p.write_text(json.dumps(make_cycle(5).to_json()))
    assert parse_graph(str(p)) == make_cycle(5)
    assert parse_graph("kbip:2,3") == g
    assert parse_graph("path:3") == make_path(3)
    with pytest.raises(InvalidParameter):
        parse_graph("wheel:5")
