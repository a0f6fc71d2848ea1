import math
from fractions import Fraction

import pytest

from dpfrac.bipartite_bounds import (
    bad_tuple_bound,
    census,
    count_bad_tuples_bruteforce,
    exact_survival_probability,
    find_good_tuple,
    lower_bound_condition,
    lower_bound_f,
    max_gap,
    min_t_for,
    monte_carlo_survival_probability,
    search_bad_cover,
    union_threshold,
    union_threshold_forms,
    upper_bound_value,
)
from dpfrac.cover import Cover, build_cover, derive_rng, enumerate_normalized_covers, identity_cover, \
    random_cover, random_partial_cover
from dpfrac.errors import InvalidParameter, NotFound
from dpfrac.graph_core import make_complete_bipartite
from dpfrac.solver import find_coloring, verify_set_coloring

import oracles


def test_bad_tuple_bound_values():
    assert bad_tuple_bound(2, 2) == 30 == math.comb(5, 4) * math.comb(4, 2)
    assert bad_tuple_bound(2, 1) == 2
    assert bad_tuple_bound(3, 1) == 6


@pytest.mark.parametrize("n,t,expected", [(2, 1, 2), (2, 2, 30), (3, 1, 6)])
def test_census_identity_cover(n, t, expected):
    res = census(n, t)
    assert res.formula_count == res.brute_count == expected
    g = make_complete_bipartite(n, 1)
    c = identity_cover(g, (n + 1) * t - 1)
    assert oracles.count_bad_tuples(c, g.parts[0], g.parts[1][0], t) == expected


def test_two_of_four_bad_at_t1():
    c = identity_cover(make_complete_bipartite(2, 1), 2)
    assert count_bad_tuples_bruteforce(c, 1) == 2
    assert math.comb(2, 1) ** 2 == 4


@pytest.mark.parametrize("n,t", [(2, 1), (2, 2), (3, 1)])
def test_census_on_random_covers(n, t):
    """Full covers hit the bound exactly; covers with deleted edges stay below it."""
    fold = (n + 1) * t - 1
    g = make_complete_bipartite(n, 1)
    for k in range(30):
        full = random_cover(g, fold, 40, task=k)
        assert count_bad_tuples_bruteforce(full, t) == bad_tuple_bound(n, t)
        partial = random_partial_cover(g, fold, derive_rng(41, k), drop=0.3)
        got = count_bad_tuples_bruteforce(partial, t)
        assert got == oracles.count_bad_tuples(partial, g.parts[0], g.parts[1][0], t)
        assert got <= bad_tuple_bound(n, t)


def test_census_with_empty_matching():
    g = make_complete_bipartite(2, 1)
    c = build_cover(g, 5, {(0, 2): list(range(5))})
    assert count_bad_tuples_bruteforce(c, 2) == 0 <= bad_tuple_bound(2, 2)


def test_threshold_values():
    assert union_threshold(2, 2) == Fraction(10, 3)
    assert 3 < union_threshold(2, 2)
    shown = 2 * Fraction(10, 10) * Fraction(11, 9) * Fraction(12, 8) * Fraction(13, 7) * Fraction(14, 6)
    assert union_threshold(2, 5) == shown
    assert union_threshold(2, 5) > 15
    assert union_threshold(2, 1) == 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_threshold_forms_agree(n):
    for t in range(1, 6):
        forms = union_threshold_forms(n, t)
        assert forms.binomial == forms.factorial == forms.product == oracles.threshold_direct(n, t)


def test_min_t():
    assert min_t_for(2, 3) == 2 and upper_bound_value(2, 2) == Fraction(5, 2)
    assert min_t_for(2, 15) == 5 and upper_bound_value(2, 5) == Fraction(14, 5)
    assert min_t_for(2, 1) == 1
    for t in range(1, 5):
        assert union_threshold(2, t) <= 15


def test_good_tuple_identity():
    c = identity_cover(make_complete_bipartite(2, 3), 5)
    gt = find_good_tuple(c, 2)
    assert verify_set_coloring(c, gt.coloring).ok
    assert all(len(s) == 2 for s in gt.coloring.selection)


def test_good_tuple_sampled_covers_below_threshold():
    for n, m, t in [(2, 3, 2), (2, 2, 2), (3, 2, 1), (2, 1, 1)]:
        assert m < union_threshold(n, t)
        g = make_complete_bipartite(n, m)
        for k in range(40):
            c = random_cover(g, (n + 1) * t - 1, 50, task=k)
            assert verify_set_coloring(c, find_good_tuple(c, t).coloring).ok


def test_good_tuple_all_normalized_k23():
    g = make_complete_bipartite(2, 3)
    count = 0
    for c in enumerate_normalized_covers(g, 5):
        assert verify_set_coloring(c, find_good_tuple(c, 2).coloring).ok
        count += 1
    assert count == 14400


def test_good_tuple_may_fail_above_threshold():
    g = make_complete_bipartite(2, 2)
    c = Cover(g, 2, ((0, 1), (0, 1), (0, 1), (1, 0)))
    assert 2 >= union_threshold(2, 1)
    with pytest.raises(NotFound):
        find_good_tuple(c, 1)
    # above the threshold a miss is legal, but any hit must still verify
    g = make_complete_bipartite(2, 6)
    for k in range(60):
        c = random_cover(g, 5, 60, task=k)
        try:
            gt = find_good_tuple(c, 2)
        except NotFound:
            continue
        assert verify_set_coloring(c, gt.coloring).ok


def test_survival_probability_values():
    assert exact_survival_probability(5, 2) == Fraction(7, 10)
    assert exact_survival_probability(3, 1) == 1
    assert exact_survival_probability(4, 2) == Fraction(1, 6)


@pytest.mark.parametrize("a,t", [(3, 1), (4, 1), (4, 2), (5, 2), (5, 1), (6, 2), (6, 3), (5, 3)])
def test_survival_probability_bruteforce(a, t):
    assert exact_survival_probability(a, t) == oracles.survival_probability(a, t)


def test_survival_probability_forms_and_range():
    for a in range(1, 30):
        for t in range(1, a + 1):
            p = exact_survival_probability(a, t)
            assert 0 <= p <= 1


@pytest.mark.parametrize("a,t", [(5, 2), (4, 2)])
def test_monte_carlo_agrees(a, t):
    est = monte_carlo_survival_probability(a, t, 100_000, 1)
    exact = float(exact_survival_probability(a, t))
    sd = math.sqrt(exact * (1 - exact) / est.trials)
    assert abs(est.estimate - exact) < 4 * sd
    assert monte_carlo_survival_probability(a, t, 100_000, 1) == est


def test_lower_bound_condition_values():
    assert lower_bound_condition(15, Fraction("0.0959")).holds
    assert lower_bound_condition(3, Fraction("0.025")).holds
    assert lower_bound_condition(3, Fraction("0.1")).holds is False
    with pytest.raises(InvalidParameter):
        lower_bound_condition(2, Fraction("0.01"))
    with pytest.raises(InvalidParameter):
        lower_bound_condition(3, Fraction("0.125"))


@pytest.mark.parametrize("m", [3, 5, 15, 50])
def test_f_increasing_on_grid(m):
    grid = [Fraction(1, 1000) + k * Fraction(498, 1000 * 99) for k in range(100)]
    values = [lower_bound_f(m, x) for x in grid]
    assert all(x < y for x, y in zip(values, values[1:]))


def test_max_gap_values():
    d15 = max_gap(15, Fraction(1, 10**4))
    d3 = max_gap(3, Fraction(1, 10**4))
    assert d15 >= Fraction("0.0959") and d3 >= Fraction("0.025")
    assert lower_bound_condition(15, d15).holds
    assert not lower_bound_condition(15, d15 + Fraction(1, 10**4)).holds


def test_max_gap_monotone_in_m():
    gaps = [max_gap(m, Fraction(1, 10**4)) for m in range(3, 31)]
    assert all(x <= y for x, y in zip(gaps, gaps[1:]))


def test_bad_cover_search():
    res = search_bad_cover(2, 2, 1, 100, 7)
    assert res.status == "witness"
    assert find_coloring(res.cover, 1, order="static").status == "none"
    assert not oracles.has_hb_coloring(res.cover, 1)
    assert search_bad_cover(3, 5, 2, 30, 7).status == "none-found"
    big = search_bad_cover(3, 81, 40, 5, 7)
    assert big.status == "generated-unverifiable"
    assert big.cover is not None and big.tuple_space == math.comb(81, 40) ** 2
