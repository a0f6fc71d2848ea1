import json

import pytest

from dpfrac.cover import Cover, complete_matchings, derive_rng, enumerate_normalized_covers, identity_cover, \
    random_cover, random_partial_cover
from dpfrac.decide import COLORABLE_EXHAUSTIVE, decide_ab_dp
from dpfrac.errors import InvalidParameter
from dpfrac.graph_core import make_cycle, make_path
from dpfrac.odd_cycle import construct_odd_cycle_coloring
from dpfrac.solver import find_coloring, verify_set_coloring


def _check_trace(c, coloring, trace):
    n = c.base.n
    r = (n - 1) // 2
    assert verify_set_coloring(c, coloring).ok
    assert all(len(s) >= r for s in coloring.selection)
    # H* is 2-regular: every color lies on exactly one decomposed cycle
    nodes = [x for cyc in trace.cycles for x in cyc]
    assert len(nodes) == len(set(nodes)) == n * n
    assert all(len(cyc) % n == 0 for cyc in trace.cycles)
    assert sum(len(p) for p in trace.paths) == n * n - trace.p
    assert sum(trace.k) == n - trace.p
    for j, k in enumerate(trace.k):
        assert k % 2 == (1 if j < trace.n_even else 0)
    assert all(t >= r for t in trace.tallies)


def test_identity_c5():
    c = identity_cover(make_cycle(5), 5)
    coloring, trace = construct_odd_cycle_coloring(c)
    _check_trace(c, coloring, trace)
    assert trace.p == 5
    assert [len(cyc) for cyc in trace.cycles] == [5] * 5
    assert [len(p) for p in trace.paths] == [4] * 5
    assert trace.tallies == (2, 2, 2, 2, 2)


def test_single_long_cycle():
    # a cyclic shift on the closing edge joins all 25 colors into one cycle
    g = make_cycle(5)
    ident = tuple(range(5))
    maps = tuple(ident if e != (0, 4) else (1, 2, 3, 4, 0) for e in g.edges)
    c = Cover(g, 5, maps)
    coloring, trace = construct_odd_cycle_coloring(c)
    _check_trace(c, coloring, trace)
    assert trace.p == 1 and len(trace.cycles[0]) == 25
    # 1-based vertex i gets r+1 colors when i is even
    assert trace.tallies == (2, 3, 2, 3, 2)


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_random_full_covers(r):
    n = 2 * r + 1
    for task in range(200):
        c = random_cover(make_cycle(n), n, 1000 + r, task=task)
        coloring, trace = construct_odd_cycle_coloring(c)
        _check_trace(c, coloring, trace)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_random_partial_covers(r):
    n = 2 * r + 1
    for task in range(100):
        c = random_partial_cover(make_cycle(n), n, derive_rng(r, task), drop=0.3)
        coloring, trace = construct_odd_cycle_coloring(c)
        assert trace.completed == complete_matchings(c)
        _check_trace(c, coloring, trace)


@pytest.mark.parametrize("r", [1, 2])
def test_every_normalized_cover_agrees_with_solver(r):
    n = 2 * r + 1
    g = make_cycle(n)
    assert decide_ab_dp(g, n, r).outcome == COLORABLE_EXHAUSTIVE
    for c in enumerate_normalized_covers(g, n):
        coloring, trace = construct_odd_cycle_coloring(c)
        _check_trace(c, coloring, trace)
        assert find_coloring(c, r).status == "found"


def test_every_normalized_c7_cover():
    g = make_cycle(7)
    count = 0
    for c in enumerate_normalized_covers(g, 7):
        coloring, _ = construct_odd_cycle_coloring(c)
        assert verify_set_coloring(c, coloring).ok
        count += 1
    assert count == 5040


def test_rejects_wrong_inputs():
    with pytest.raises(InvalidParameter):
        construct_odd_cycle_coloring(identity_cover(make_cycle(4), 4))
    with pytest.raises(InvalidParameter):
        construct_odd_cycle_coloring(identity_cover(make_cycle(5), 4))
    with pytest.raises(InvalidParameter):
        construct_odd_cycle_coloring(identity_cover(make_path(5), 5))


def test_trace_json():
    c = random_cover(make_cycle(7), 7, 17)
    _, trace = construct_odd_cycle_coloring(c)
    data = json.loads(json.dumps(trace.to_json()))
    assert data["p"] == trace.p and sum(data["path_lengths"]) == 49 - trace.p
    assert all(1 <= col <= 7 for _, col in data["selected"])
