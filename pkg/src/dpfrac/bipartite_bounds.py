"""Upper and lower bounds for the fractional DP-chromatic number of K_{n,m}.

Upper side: choose t colors at each of v_1..v_n; the tuple is *bad* for u_j if
fewer than t colors of u_j survive. Counting bad tuples for one u_j and taking
a union bound over the m vertices of B gives ((n+1)t-1, t)-DP-colorability.

Lower side (n = 2): under uniformly random perfect matchings a fixed tuple
survives at u_j with an explicit hypergeometric probability, and
``lower_bound_f(m, d) < 1`` certifies that 2 + d is a lower bound.

Counts are Python integers and thresholds are :class:`fractions.Fraction`;
only ``lower_bound_f`` is evaluated in floating point (mpmath, 50 digits).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from mpmath import mp, mpf

from .cover import UNMATCHED, Cover, derive_rng, identity_cover, random_cover
from .errors import (
    IntegrityError,
    InvalidParameter,
    NoBound,
    NotFound,
    TooLarge,
)
from .graph_core import make_complete_bipartite
from .solver import SetColoring, find_coloring, verify_set_coloring

F_PRECISION_DIGITS = 50
F_GUARD = mpf("1e-10")
GAP_CAP = Fraction(1, 8)  # the lower-bound argument needs 0 < d < 1/8
DEFAULT_TUPLE_BUDGET = 10**7

Rational = Union[Fraction, int, str, float]


def _frac(x: Rational) -> Fraction:
    # floats go through their shortest repr so that 0.0959 means 959/10000
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def subset_masks(k: int, t: int) -> list[int]:
    """All t-subsets of ``range(k)`` as bitmasks, in lexicographic order."""
    return [sum(1 << i for i in combo) for combo in itertools.combinations(range(k), t)]


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def _or_all(values) -> int:
    out = 0
    for v in values:
        out |= v
    return out


# --- bad-tuple census -------------------------------------------------------

def bad_tuple_bound(n: int, t: int) -> int:
    """Upper bound on tuples (A_1..A_n) that are bad for a single B-vertex."""
    if n < 2 or t < 1:
        raise InvalidParameter("need n >= 2 and t >= 1")
    out = math.comb((n + 1) * t - 1, n * t)
    for i in range(n - 1):
        out *= math.comb((n - i) * t, t)
    return out


def _bipartite_sides(c: Cover) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if c.base.parts is None:
        raise InvalidParameter("cover base must be a complete bipartite graph with recorded parts")
    return c.base.parts


def _image_masks(c: Cover, v: int, u: int, masks: Sequence[int]) -> list[int]:
    mp = c.matching(v, u)
    out = []
    for m in masks:
        img = 0
        for i in _bits(m):
            if mp[i] != UNMATCHED:
                img |= 1 << mp[i]
        out.append(img)
    return out


@dataclass(frozen=True)
class BadTupleCensus:
    n: int
    t: int
    fold: int
    formula_count: int
    brute_count: Optional[int]
    total_tuples: int

    def to_json(self) -> dict:
        return {
            "n": self.n, "t": self.t, "fold": self.fold,
            "formula_count": str(self.formula_count),
            "brute_count": None if self.brute_count is None else str(self.brute_count),
            "total_tuples": str(self.total_tuples),
            "match": self.brute_count == self.formula_count,
        }


def count_bad_tuples_bruteforce(c: Cover, t: int, u: Optional[int] = None,
                                budget: int = DEFAULT_TUPLE_BUDGET) -> int:
    """Count t-subset tuples on side A leaving fewer than t free colors at ``u``.

    ``u`` defaults to the first vertex of B. Tuples are streamed, never stored.
    """
    a_side, b_side = _bipartite_sides(c)
    u = b_side[0] if u is None else u
    per = math.comb(c.fold, t)
    if per ** len(a_side) > budget:
        raise TooLarge(f"{per}^{len(a_side)} tuples exceed the budget of {budget}", per ** len(a_side), budget)
    masks = subset_masks(c.fold, t)
    images = [_image_masks(c, v, u, masks) for v in a_side]
    limit = c.fold - t  # bad iff more than fold - t colors of u are hit
    bad = 0
    for combo in itertools.product(*images):
        hit = 0
        for m in combo:
            hit |= m
        if hit.bit_count() > limit:
            bad += 1
    return bad


def census(n: int, t: int, cover: Optional[Cover] = None, brute: bool = True) -> BadTupleCensus:
    """Formula vs brute-force count on ``cover`` (default: identity cover of K_{n,1})."""
    fold = (n + 1) * t - 1
    if cover is None:
        cover = identity_cover(make_complete_bipartite(n, 1), fold)
    bc = count_bad_tuples_bruteforce(cover, t) if brute else None
    return BadTupleCensus(n, t, fold, bad_tuple_bound(n, t), bc, math.comb(fold, t) ** n)


# --- union-bound threshold ------------------------------------------------

@dataclass(frozen=True)
class ThresholdForms:
    binomial: Fraction
    factorial: Fraction
    product: Fraction

    @property
    def value(self) -> Fraction:
        return self.binomial


def union_threshold_forms(n: int, t: int) -> ThresholdForms:
    """The union-bound threshold on m, evaluated in its three algebraic forms."""
    if n < 2 or t < 1:
        raise InvalidParameter("need n >= 2 and t >= 1")
    big = (n + 1) * t - 1
    binomial = Fraction(math.comb(big, t) ** n, bad_tuple_bound(n, t))
    fact = Fraction(n)
    for i in range(n - 1):
        fact *= Fraction(math.factorial(n * t - 1 + t) * math.factorial((n - i) * t - t),
                         math.factorial(n * t - 1) * math.factorial((n - i) * t))
    prod = Fraction(n)
    for i in range(n - 1):
        for j in range(t):
            prod *= Fraction(n * t + j, (n - i) * t - j)
    return ThresholdForms(binomial, fact, prod)


def union_threshold(n: int, t: int) -> Fraction:
    """Largest-m threshold: K_{n,m} is ((n+1)t-1, t)-DP-colorable whenever m is below it."""
    forms = union_threshold_forms(n, t)
    if not forms.binomial == forms.factorial == forms.product:
        raise IntegrityError(f"threshold forms disagree at n={n}, t={t}: {forms}")
    return forms.value


def min_t_for(n: int, m: int, limit: int = 10**4) -> int:
    """Smallest t with m below the union-bound threshold."""
    if n < 2 or m < 1:
        raise InvalidParameter("need n >= 2 and m >= 1")
    for t in range(1, limit + 1):
        if m < union_threshold(n, t):
            return t
    raise IntegrityError(f"no t <= {limit} works for n={n}, m={m}; the threshold should diverge")


def upper_bound_value(n: int, t: int) -> Fraction:
    return n + 1 - Fraction(1, t)


# --- good tuples -------------------------------------------------------------

@dataclass(frozen=True)
class GoodTuple:
    subsets: tuple[tuple[int, ...], ...]  # the chosen t colors at each A-vertex
    rank: int  # position in lexicographic tuple order
    coloring: SetColoring


def find_good_tuple(c: Cover, t: int, start: int = 0, stop: Optional[int] = None) -> GoodTuple:
    """First tuple (in lexicographic order) that is bad for no vertex of B.

    The coloring takes the chosen sets on A and, at each u_j, the t lowest
    surviving colors. Raises :class:`NotFound` when no tuple in
    ``[start, stop)`` is good; if the union-bound hypothesis holds and the full
    range was scanned, that is an :class:`IntegrityError` instead.
    """
    a_side, b_side = _bipartite_sides(c)
    n, m = len(a_side), len(b_side)
    if c.fold != (n + 1) * t - 1:
        raise InvalidParameter(f"fold must be (n+1)t-1 = {(n + 1) * t - 1}, got {c.fold}")
    masks = subset_masks(c.fold, t)
    images = [[_image_masks(c, v, u, masks) for u in b_side] for v in a_side]
    limit = c.fold - t
    total = len(masks) ** n
    stop = total if stop is None else min(stop, total)
    for rank in range(start, stop):
        idx, rest = [], rank
        for _ in range(n):
            rest, d = divmod(rest, len(masks))
            idx.append(d)
        idx.reverse()  # A_1 is the most significant position
        hits = []
        for jb in range(m):
            hit = 0
            for iv in range(n):
                hit |= images[iv][jb][idx[iv]]
            if hit.bit_count() > limit:
                break
            hits.append(hit)
        else:
            sel: list[tuple[int, ...]] = [()] * c.base.n
            for iv, v in enumerate(a_side):
                sel[v] = tuple(_bits(masks[idx[iv]]))
            for jb, u in enumerate(b_side):
                sel[u] = tuple(i for i in range(c.fold) if not (hits[jb] >> i) & 1)[:t]
            res = verify_set_coloring(c, SetColoring(t, tuple(sel)))
            if not res.ok:
                raise IntegrityError(f"good tuple does not extend: {res.describe()}")
            return GoodTuple(tuple(sel[v] for v in a_side), rank, res.coloring)
    if start == 0 and stop == total and m < union_threshold(n, t):
        raise IntegrityError(f"no good tuple although m={m} is below the union-bound threshold")
    raise NotFound("no good tuple in range")


# --- random-matching lower bound ---------------------------------------------

def exact_survival_probability(a: int, t: int, check: bool = True) -> Fraction:
    """Probability that a fixed pair (A_1, A_2) is not bad for one u_j.

    Under independent uniform perfect matchings the images of A_1 and A_2 in
    L(u_j) are independent uniform t-subsets, and at least t colors survive iff
    they overlap in at least 3t - a colors. Computed both as the hypergeometric
    tail and in re-indexed form; the two must agree. Both forms are valid for
    any 1 <= t <= a (the probability is 0 when a < 2t).
    """
    if not 1 <= t <= a:
        raise InvalidParameter("need 1 <= t <= a")
    total = math.comb(a, t)
    tail = sum(math.comb(t, i) * math.comb(a - t, t - i) for i in range(max(0, 3 * t - a), t + 1))
    reindexed = sum(math.comb(t, i) * math.comb(a - t, i) for i in range(0, a - 2 * t + 1))
    p = Fraction(tail, total)
    if check and p != Fraction(reindexed, total):
        raise IntegrityError(f"survival probability forms disagree at a={a}, t={t}")
    if not 0 <= p <= 1:
        raise IntegrityError("probability out of range")
    return p


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int
    successes: int
    seed: int


def monte_carlo_survival_probability(a: int, t: int, trials: int, seed: int) -> MonteCarloEstimate:
    """Empirical counterpart of :func:`exact_survival_probability`.

    Draws two independent uniform perfect matchings v_1 -> u and v_2 -> u per
    trial and fixes A_1 = A_2 = the first t color indices.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if not 1 <= t <= a:
        raise InvalidParameter("need 1 <= t <= a")
    rng = derive_rng(seed)
    base = np.broadcast_to(np.arange(a), (trials, a))
    p1 = rng.permuted(base, axis=1)
    p2 = rng.permuted(base, axis=1)
    hit = np.zeros((trials, a), dtype=bool)
    rows = np.arange(trials)[:, None]
    hit[rows, p1[:, :t]] = True
    hit[rows, p2[:, :t]] = True
    survivors = a - hit.sum(axis=1)
    k = int((survivors >= t).sum())
    est = k / trials
    return MonteCarloEstimate(est, math.sqrt(est * (1 - est) / trials), trials, k, seed)


def lower_bound_f(m: int, x: Rational):
    """f(x) = (x+2)^(2/m) (x+1)^(x+1) (1-x)^(x-1) / ((x+2) x^(2x)) on (0, 1), 50 digits."""
    xf = _frac(x)
    if not 0 < xf < 1:
        raise InvalidParameter("f is defined on (0, 1)")
    with mp.workdps(F_PRECISION_DIGITS):
        x = mpf(xf.numerator) / xf.denominator
        return (x + 2) ** (mpf(2) / m) * (x + 1) ** (x + 1) * (1 - x) ** (x - 1) / ((x + 2) * x ** (2 * x))


@dataclass(frozen=True)
class LowerBoundCheck:
    m: int
    d: Fraction
    f_value: str
    status: str  # "holds" | "fails" | "too-close"

    @property
    def holds(self) -> Optional[bool]:
        return {"holds": True, "fails": False}.get(self.status)


def lower_bound_condition(m: int, d: Rational) -> LowerBoundCheck:
    """Check ``f(d) < 1`` for K_{2,m}, which gives 2 + d <= chi*_DP(K_{2,m}).

    Values of f within 1e-10 of 1 are reported as ``"too-close"`` instead of
    a verdict.
    """
    dq = _frac(d)
    if m < 3:
        raise InvalidParameter("need m >= 3")
    if not 0 < dq < GAP_CAP:
        raise InvalidParameter("need 0 < d < 0.125")
    f = lower_bound_f(m, dq)
    with mp.workdps(F_PRECISION_DIGITS):
        if abs(f - 1) <= F_GUARD:
            status = "too-close"
        else:
            status = "holds" if f < 1 else "fails"
        text = mp.nstr(f, 30)
    return LowerBoundCheck(m, dq, text, status)


def max_gap(m: int, tol: Rational = Fraction(1, 10**6)) -> Fraction:
    """Largest certified d in (0, 1/8) with f(d) < 1, to within ``tol``.

    Bisection over exact rationals, relying on f increasing on (0, 1/2). The
    result is rounded down onto the grid of multiples of ``tol`` and is itself
    certified by :func:`lower_bound_condition`.
    """
    tol = _frac(tol)
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if m < 3:
        raise InvalidParameter("need m >= 3")

    def ok(x: Fraction) -> bool:
        with mp.workdps(F_PRECISION_DIGITS):
            return lower_bound_f(m, x) < 1 - F_GUARD

    lo, hi = Fraction(0), GAP_CAP
    probe = min(tol, GAP_CAP / 2)
    if not ok(probe):
        raise NoBound(f"f(d) >= 1 already at d={probe} for m={m}")
    if ok(hi):
        lo = hi  # capped: stay inside 0 < d < 1/8
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    d = math.floor(lo / tol) * tol
    if d >= GAP_CAP:
        d -= tol
    # the bracket is only tol wide, so the next grid point may still qualify
    while d + tol < GAP_CAP and ok(d + tol):
        d += tol
    if d <= 0 or lower_bound_condition(m, d).status != "holds":
        raise NoBound(f"no certified gap on the tol grid for m={m}")
    return d


# --- searching for a bad cover ---------------------------------------------

@dataclass
class BadCoverSearch:
    status: str  # "witness" | "none-found" | "generated-unverifiable"
    cover: Optional[Cover]
    trial: Optional[int]
    trials_run: int
    seed: int
    tuple_space: int
    stats: dict = field(default_factory=dict)


def _no_good_pair(c: Cover, t: int) -> bool:
    """True iff every (A_1, A_2) leaves some u_j with fewer than t survivors."""
    try:
        find_good_tuple_any(c, t)
    except NotFound:
        return True
    return False


def find_good_tuple_any(c: Cover, t: int) -> tuple[tuple[int, ...], ...]:
    """Like :func:`find_good_tuple` but for any fold (no threshold hypothesis)."""
    a_side, b_side = _bipartite_sides(c)
    masks = subset_masks(c.fold, t)
    images = [[_image_masks(c, v, u, masks) for u in b_side] for v in a_side]
    limit = c.fold - t
    for idx in itertools.product(range(len(masks)), repeat=len(a_side)):
        if all(
            _or_all(images[iv][jb][idx[iv]] for iv in range(len(a_side))).bit_count() <= limit
            for jb in range(len(b_side))
        ):
            return tuple(tuple(_bits(masks[i])) for i in idx)
    raise NotFound("no good tuple")


def search_bad_cover(m: int, a: int, t: int, trials: int, seed: int,
                     tuple_budget: int = DEFAULT_TUPLE_BUDGET,
                     node_budget: Optional[int] = 10**7) -> BadCoverSearch:
    """Sample random full a-fold covers of K_{2,m} looking for one with no (H,t)-coloring.

    A witness is only reported after two independent refutations: every pair of
    t-subsets on A is bad for some u_j, and the exact solver exhausts its
    search. If the pair space exceeds ``tuple_budget`` the first sampled cover
    is returned as ``generated-unverifiable``.
    """
    g = make_complete_bipartite(2, m)
    space = math.comb(a, t) ** 2
    if space > tuple_budget:
        return BadCoverSearch("generated-unverifiable", random_cover(g, a, seed, task=0), 0, 1, seed, space,
                              {"reason": f"pair space {space} exceeds budget {tuple_budget}"})
    for i in range(trials):
        c = random_cover(g, a, seed, task=i)
        if not _no_good_pair(c, t):
            continue
        res = find_coloring(c, t, budget=node_budget)
        if res.status == "found":
            raise IntegrityError("pair scan refuted a cover that the solver colors")
        if res.status == "unknown":
            return BadCoverSearch("generated-unverifiable", c, i, i + 1, seed, space,
                                  {"reason": "solver budget exhausted", "nodes": res.nodes})
        return BadCoverSearch("witness", c, i, i + 1, seed, space, {"nodes": res.nodes})
    return BadCoverSearch("none-found", None, None, trials, seed, space)
