"""Deciding (a,b)-DP-colorability by quantifying the solver over covers.

Soundness of the exhaustive mode rests on two facts:

* Only full covers need checking. Adding cross-edges never creates colorings,
  so a full cover without an (H,b)-coloring refutes (a,b)-DP-colorability, and
  if every full cover is colorable then so is every cover (complete it with
  :func:`~dpfrac.cover.complete_matchings`; its colorings are colorings of the
  original).
* Only normalized full covers need checking. Relabeling colors along a
  spanning tree turns any full cover into one with identity matchings on the
  tree, and relabeling is a bijection on (H,b)-colorings.

Fold 1 is decided directly, since tree normalization needs two colors.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .cover import (
    RNG_ALGORITHM,
    Cover,
    derive_rng,
    enumerate_normalized_covers,
    enumeration_size,
    identity_cover,
    random_cover,
    random_partial_cover,
)
from .errors import IntegrityError, InvalidParameter, TooLarge
from .graph_core import Graph
from .parallel import chunk_ranges, map_chunks
from .solver import find_coloring

COLORABLE_EXHAUSTIVE = "ColorableExhaustive"
NOT_COLORABLE = "NotColorable"
COLORABLE_SAMPLED = "ColorableSampledOnly"
UNKNOWN = "Unknown"

EXIT_CODES = {COLORABLE_EXHAUSTIVE: 0, COLORABLE_SAMPLED: 0, NOT_COLORABLE: 1, UNKNOWN: 2}

DEFAULT_SAMPLES = 10**4
DEFAULT_NODE_BUDGET = 10**7
DEFAULT_COVER_BUDGET = 10**5


@dataclass
class Verdict:
    graph: Graph
    a: int
    b: int
    mode: str
    outcome: str
    witness: Optional[Cover] = None
    witness_index: Optional[int] = None
    stats: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "a": self.a,
            "b": self.b,
            "mode": self.mode,
            "outcome": self.outcome,
            "witness": None if self.witness is None else self.witness.to_json(),
            "witness_index": self.witness_index,
            "stats": self.stats,
        }


@dataclass
class _Chunk:
    covers: int = 0
    nodes: int = 0
    max_nodes: int = 0
    unknown: int = 0
    colored: int = 0
    partial: int = 0
    refuted_at: Optional[int] = None
    witness_maps: Optional[tuple] = None
    timed_out: bool = False


def _run_search(chunk: _Chunk, c: Cover, b: int, node_budget: Optional[int]) -> str:
    res = find_coloring(c, b, budget=node_budget)
    chunk.covers += 1
    chunk.nodes += res.nodes
    chunk.max_nodes = max(chunk.max_nodes, res.nodes)
    if res.status == "found":
        chunk.colored += 1
    elif res.status == "unknown":
        chunk.unknown += 1
    return res.status


def _exhaustive_chunk(g, a, b, start, stop, node_budget, deadline) -> _Chunk:
    chunk = _Chunk()
    for idx, c in zip(range(start, stop), enumerate_normalized_covers(g, a, start=start, stop=stop)):
        if _run_search(chunk, c, b, node_budget) == "none":
            chunk.refuted_at, chunk.witness_maps = idx, c.maps
            return chunk
        if deadline is not None and time.monotonic() > deadline:
            chunk.timed_out = True
            return chunk
    return chunk


def _sampled_chunk(g, a, b, start, stop, seed, partial_fraction, node_budget, deadline) -> _Chunk:
    chunk = _Chunk()
    for idx in range(start, stop):
        rng = derive_rng(seed, idx)
        if partial_fraction > 0 and rng.random() < partial_fraction:
            c = random_partial_cover(g, a, rng)
            chunk.partial += 1
        else:
            c = random_cover(g, a, rng=rng)
        if _run_search(chunk, c, b, node_budget) == "none":
            chunk.refuted_at, chunk.witness_maps = idx, c.maps
            return chunk
        if deadline is not None and time.monotonic() > deadline:
            chunk.timed_out = True
            return chunk
    return chunk


def _merge(chunks: list[_Chunk]) -> tuple[_Chunk, Optional[_Chunk]]:
    """Sum statistics up to and including the first chunk holding a refutation.

    Chunks are contiguous and in index order, so the first refuting chunk holds
    the lowest refuting index, and every chunk before it ran to completion.
    The totals therefore do not depend on how the range was split.
    """
    total = _Chunk()
    winner = None
    for ch in chunks:
        for name in ("covers", "nodes", "unknown", "colored", "partial"):
            setattr(total, name, getattr(total, name) + getattr(ch, name))
        total.max_nodes = max(total.max_nodes, ch.max_nodes)
        total.timed_out = total.timed_out or ch.timed_out
        if ch.refuted_at is not None:
            winner = ch
            break
    return total, winner


def _reverify(witness: Cover, b: int) -> None:
    res = find_coloring(witness, b, order="static")
    if res.status != "none":
        raise IntegrityError(f"independent search disagrees on the refutation witness ({res.status})")


def decide_ab_dp(g: Graph, a: int, b: int, mode: str = "exhaustive", *, samples: int = DEFAULT_SAMPLES,
                 seed: int = 0, partial_fraction: float = 0.1, node_budget: Optional[int] = DEFAULT_NODE_BUDGET,
                 cover_budget: Optional[int] = DEFAULT_COVER_BUDGET, jobs: int = 1,
                 time_limit: Optional[float] = None) -> Verdict:
    """Decide whether ``g`` is (a,b)-DP-colorable.

    ``mode="exhaustive"`` checks every normalized full cover and returns
    ``ColorableExhaustive`` or ``NotColorable``; it raises :class:`TooLarge`
    up front when ``(a!)**rank`` exceeds ``cover_budget``. ``mode="sampled"``
    draws ``samples`` random covers (a ``partial_fraction`` of them with
    randomly deleted cross-edges) and can only refute or report
    ``ColorableSampledOnly``. Exhausting ``node_budget`` on some cover, or
    ``time_limit`` seconds overall, yields ``Unknown`` unless a refutation was
    found anyway. Every witness is re-checked by a second search with a
    different branching order.
    """
    if not 1 <= b <= a:
        raise InvalidParameter("need a >= b >= 1")
    if mode not in ("exhaustive", "sampled"):
        raise InvalidParameter(f"unknown mode {mode!r}")
    deadline = None if time_limit is None else time.monotonic() + time_limit

    if mode == "exhaustive" and a == 1:
        # one 1-fold full cover up to relabeling; colorable iff no edges
        c = identity_cover(g, 1)
        ok = g.n_edges == 0
        stats = {"covers_examined": 1, "enumeration_size": 1, "nodes": 0}
        if ok:
            return Verdict(g, a, b, mode, COLORABLE_EXHAUSTIVE, stats=stats)
        return Verdict(g, a, b, mode, NOT_COLORABLE, c, 0, stats)

    if mode == "exhaustive":
        total = enumeration_size(g, a)
        if cover_budget is not None and total > cover_budget:
            raise TooLarge(f"{total} normalized covers exceed the budget of {cover_budget}", total, cover_budget)
        ranges = chunk_ranges(total, 1 if jobs <= 1 else 4 * jobs)
        chunks = map_chunks(_exhaustive_chunk, [(g, a, b, lo, hi, node_budget, deadline) for lo, hi in ranges], jobs)
    else:
        total = samples
        ranges = chunk_ranges(total, 1 if jobs <= 1 else 4 * jobs)
        chunks = map_chunks(_sampled_chunk, [(g, a, b, lo, hi, seed, partial_fraction, node_budget, deadline)
                                             for lo, hi in ranges], jobs)

    merged, winner = _merge(chunks)
    stats = {
        "covers_examined": merged.covers,
        "nodes": merged.nodes,
        "max_nodes_per_cover": merged.max_nodes,
        "unknown_covers": merged.unknown,
        "colored_covers": merged.colored,
    }
    if mode == "exhaustive":
        stats["enumeration_size"] = total
    else:
        stats.update(samples=samples, seed=seed, rng=RNG_ALGORITHM, partial_covers=merged.partial,
                     fraction_colored=f"{merged.colored}/{merged.covers}")
    if merged.timed_out:
        stats["timed_out"] = True

    if winner is not None:
        witness = Cover(g, a, winner.witness_maps)
        _reverify(witness, b)
        stats["witness_reverified"] = True
        return Verdict(g, a, b, mode, NOT_COLORABLE, witness, winner.refuted_at, stats)
    if merged.unknown or merged.timed_out:
        return Verdict(g, a, b, mode, UNKNOWN, stats=stats)
    return Verdict(g, a, b, mode, COLORABLE_EXHAUSTIVE if mode == "exhaustive" else COLORABLE_SAMPLED,
                   stats=stats)


def ab_coloring(g: Graph, a: int, b: int, budget: Optional[int] = 10**9):
    """Some (a,b)-coloring of ``g`` as a tuple of b-subsets of ``range(a)``, or None.

    Plain backtracking in vertex order over all b-subsets; independent of the
    cover machinery.
    """
    if not 1 <= b <= a:
        raise InvalidParameter("need a >= b >= 1")
    size = math.comb(a, b) ** g.n
    if budget is not None and size > budget:
        raise TooLarge(f"C({a},{b})^{g.n} = {size} assignments exceed the budget of {budget}", size, budget)
    subsets = [sum(1 << i for i in combo) for combo in itertools.combinations(range(a), b)]
    earlier = [[w for w in g.neighbors(v) if w < v] for v in range(g.n)]
    chosen = [0] * g.n

    def extend(v: int) -> bool:
        if v == g.n:
            return True
        for s in subsets:
            if all(not (s & chosen[w]) for w in earlier[v]):
                chosen[v] = s
                if extend(v + 1):
                    return True
        return False

    if not extend(0):
        return None
    return tuple(tuple(i for i in range(a) if (s >> i) & 1) for s in chosen)


def is_ab_colorable(g: Graph, a: int, b: int, budget: Optional[int] = 10**9) -> bool:
    return ab_coloring(g, a, b, budget) is not None
