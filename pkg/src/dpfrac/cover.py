"""DP-covers of a graph.

An ``a``-fold cover is stored as one partial injective map per edge ``(u, v)``
with ``u < v``: ``maps[k][i]`` is the color of ``v`` matched to color ``i`` of
``u``, or ``UNMATCHED``. Colors are ``0..a-1`` in the Python API and ``1..a``
(with ``0`` meaning unmatched) in JSON.

The lists ``L(v)`` and the cliques on them are implicit; two colors chosen at the
same vertex never conflict with each other in an (H,b)-coloring.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    FoldTooSmall,
    InvalidAssignment,
    InvalidColor,
    InvalidParameter,
    InvalidTree,
    MalformedInput,
    NonEdgeMatching,
    NonInjectiveMatching,
    TooLarge,
)
from .graph_core import Edge, Graph, bfs_spanning_tree, components, cyclomatic_rank

UNMATCHED = -1

# Named in certificates; changing the sampling procedure means bumping this.
RNG_ALGORITHM = "numpy-PCG64+SeedSequence(seed,task);fisher-yates;v1"


def derive_rng(seed: int, task: int = 0) -> np.random.Generator:
    """Generator for one (seed, task) pair; independent streams per task."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(task)])))


@dataclass(frozen=True)
class Cover:
    base: Graph
    fold: int
    maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.fold < 1:
            raise InvalidParameter("fold must be >= 1")
        if len(self.maps) != self.base.n_edges:
            raise InvalidParameter("one map per edge of the base graph required")
        for (u, v), mp in zip(self.base.edges, self.maps):
            if len(mp) != self.fold:
                raise InvalidColor(f"map on edge ({u},{v}) has length {len(mp)}, expected {self.fold}")
            seen = set()
            for j in mp:
                if j == UNMATCHED:
                    continue
                if not 0 <= j < self.fold:
                    raise InvalidColor(f"color {j} outside [0,{self.fold}) on edge ({u},{v})")
                if j in seen:
                    raise NonInjectiveMatching(f"map on edge ({u},{v}) hits color {j} twice")
                seen.add(j)

    @cached_property
    def full(self) -> bool:
        return all(UNMATCHED not in mp for mp in self.maps)

    @cached_property
    def _oriented(self) -> dict[Edge, tuple[int, ...]]:
        out = {}
        for (u, v), mp in zip(self.base.edges, self.maps):
            inv = [UNMATCHED] * self.fold
            for i, j in enumerate(mp):
                if j != UNMATCHED:
                    inv[j] = i
            out[(u, v)] = mp
            out[(v, u)] = tuple(inv)
        return out

    def matching(self, u: int, v: int) -> tuple[int, ...]:
        """Map from colors of ``u`` to matched colors of ``v`` (either orientation)."""
        try:
            return self._oriented[(u, v)]
        except KeyError:
            raise NonEdgeMatching(f"({u},{v}) is not an edge of the base graph") from None

    def edge_map(self, u: int, v: int) -> tuple[int, ...]:
        return self.matching(u, v)

    def cross_edges(self):
        """Yield the cross-edges ``((u, i), (v, j))`` with ``u < v``."""
        for (u, v), mp in zip(self.base.edges, self.maps):
            for i, j in enumerate(mp):
                if j != UNMATCHED:
                    yield (u, i), (v, j)

    def to_json(self) -> dict:
        return {
            "graph": self.base.to_json(),
            "fold": self.fold,
            "matchings": [
                {"u": u, "v": v, "map": [j + 1 for j in mp]}
                for (u, v), mp in zip(self.base.edges, self.maps)
            ],
        }

    @classmethod
    def from_json(cls, data) -> "Cover":
        if not isinstance(data, dict):
            raise MalformedInput("cover must be an object")
        if "graph" not in data:
            raise MalformedInput("missing field", "$.graph")
        try:
            g = Graph.from_json(data["graph"])
        except MalformedInput as exc:
            raise MalformedInput(str(exc).split(": ", 1)[-1], exc.pointer.replace("$", "$.graph", 1)) from exc
        fold = data.get("fold")
        if not isinstance(fold, int) or isinstance(fold, bool):
            raise MalformedInput("expected integer", "$.fold")
        raw = data.get("matchings")
        if not isinstance(raw, list):
            raise MalformedInput("expected list", "$.matchings")
        matchings = {}
        for k, item in enumerate(raw):
            ptr = f"$.matchings[{k}]"
            if not isinstance(item, dict):
                raise MalformedInput("expected object", ptr)
            for key in ("u", "v"):
                if not isinstance(item.get(key), int):
                    raise MalformedInput("expected integer", f"{ptr}.{key}")
            mp = item.get("map")
            if not isinstance(mp, list) or not all(isinstance(x, int) for x in mp):
                raise MalformedInput("expected list of integers", f"{ptr}.map")
            matchings[(item["u"], item["v"])] = [x - 1 for x in mp]
        return build_cover(g, fold, matchings)


def build_cover(g: Graph, fold: int, matchings: Mapping) -> Cover:
    """Validate per-edge matchings and assemble a :class:`Cover`.

    ``matchings`` maps a vertex pair ``(u, v)`` (either orientation) to either a
    length-``fold`` sequence of target colors (``-1``/``None`` for unmatched) or a
    dict ``{color_of_u: color_of_v}``. Edges without an entry get the empty
    matching.
    """
    if fold < 1:
        raise InvalidParameter("fold must be >= 1")
    per_edge: dict[Edge, tuple[int, ...]] = {}
    for (u, v), spec in matchings.items():
        in_range = 0 <= u < g.n and 0 <= v < g.n
        if not (in_range and g.has_edge(u, v)):
            raise NonEdgeMatching(f"matching given on non-edge ({u},{v})")
        if isinstance(spec, Mapping):
            arr = [UNMATCHED] * fold
            for i, j in spec.items():
                if not 0 <= i < fold:
                    raise InvalidColor(f"color {i} outside [0,{fold}) on ({u},{v})")
                arr[i] = UNMATCHED if j is None else j
        else:
            arr = [UNMATCHED if j is None else j for j in spec]
            if len(arr) != fold:
                raise InvalidColor(f"map on ({u},{v}) has length {len(arr)}, expected {fold}")
        for j in arr:
            if j != UNMATCHED and not 0 <= j < fold:
                raise InvalidColor(f"color {j} outside [0,{fold}) on ({u},{v})")
        targets = [j for j in arr if j != UNMATCHED]
        if len(set(targets)) != len(targets):
            raise NonInjectiveMatching(f"map on ({u},{v}) is not injective")
        if u > v:
            inv = [UNMATCHED] * fold
            for i, j in enumerate(arr):
                if j != UNMATCHED:
                    inv[j] = i
            arr, key = inv, (v, u)
        else:
            key = (u, v)
        if key in per_edge:
            raise InvalidParameter(f"edge {key} given twice")
        per_edge[key] = tuple(arr)
    empty = (UNMATCHED,) * fold
    return Cover(g, fold, tuple(per_edge.get(e, empty) for e in g.edges))


def identity_cover(g: Graph, fold: int) -> Cover:
    ident = tuple(range(fold))
    return Cover(g, fold, (ident,) * g.n_edges)


def complete_matchings(c: Cover) -> Cover:
    """Extend every partial matching to a permutation.

    Unmatched colors of ``u`` are paired, in increasing order, with the lowest
    unused colors of ``v``. Adding cross-edges only removes colorings, so every
    coloring of the result is a coloring of ``c``.
    """
    if c.full:
        return c
    out = []
    for mp in c.maps:
        used = set(j for j in mp if j != UNMATCHED)
        free = iter(j for j in range(c.fold) if j not in used)
        out.append(tuple(j if j != UNMATCHED else next(free) for j in mp))
    return Cover(c.base, c.fold, tuple(out))


@dataclass(frozen=True)
class SpanningTreeNormalization:
    tree_edges: tuple[Edge, ...]
    cotree_edges: tuple[Edge, ...]
    relabeling: tuple[tuple[int, ...], ...]  # relabeling[v][old_color] = new_color

    def map_selection(self, selection):
        """Carry a per-vertex color selection from the original cover to the normalized one."""
        return tuple(tuple(sorted(self.relabeling[v][c] for c in sel)) for v, sel in enumerate(selection))

    def unmap_selection(self, selection):
        inverse = []
        for perm in self.relabeling:
            inv = [0] * len(perm)
            for old, new in enumerate(perm):
                inv[new] = old
            inverse.append(inv)
        return tuple(tuple(sorted(inverse[v][c] for c in sel)) for v, sel in enumerate(selection))


def _check_spanning_forest(g: Graph, tree: Sequence[Edge]) -> tuple[Edge, ...]:
    edges = tuple(sorted({(min(u, v), max(u, v)) for u, v in tree}))
    if len(edges) != len(tree):
        raise InvalidTree("repeated tree edge")
    for e in edges:
        if e not in g.edge_set:
            raise InvalidTree(f"{e} is not an edge of the base graph")
    if len(edges) != g.n - len(components(g)):
        raise InvalidTree("wrong number of edges for a spanning tree")
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise InvalidTree(f"tree edges contain a cycle through ({u},{v})")
        parent[ru] = rv
    return edges


def normalize_tree(c: Cover, tree: Optional[Sequence[Edge]] = None):
    """Relabel colors so that every tree-edge matching is the identity.

    Returns the relabeled cover and the :class:`SpanningTreeNormalization`
    describing the relabeling. Co-tree edges keep whatever permutation
    ("twist") the relabeling leaves on them.
    """
    if c.fold < 2:
        raise FoldTooSmall("tree normalization requires fold >= 2")
    if not c.full:
        raise InvalidParameter("tree normalization requires a full cover; complete it first")
    g = c.base
    tree_edges = bfs_spanning_tree(g) if tree is None else _check_spanning_forest(g, tree)
    tree_set = set(tree_edges)
    tadj: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in tree_edges:
        tadj[u].append(v)
        tadj[v].append(u)
    relabel: list[Optional[list[int]]] = [None] * g.n
    for root in range(g.n):
        if relabel[root] is not None:
            continue
        relabel[root] = list(range(c.fold))
        queue = deque([root])
        while queue:
            p = queue.popleft()
            for ch in sorted(tadj[p]):
                if relabel[ch] is not None:
                    continue
                sigma = c.matching(p, ch)
                pi_c = [0] * c.fold
                for i, j in enumerate(sigma):
                    pi_c[j] = relabel[p][i]
                relabel[ch] = pi_c
                queue.append(ch)
    new_maps = []
    for (u, v), mp in zip(g.edges, c.maps):
        arr = [0] * c.fold
        for i, j in enumerate(mp):
            arr[relabel[u][i]] = relabel[v][j]
        new_maps.append(tuple(arr))
    norm = SpanningTreeNormalization(
        tree_edges=tree_edges,
        cotree_edges=tuple(e for e in g.edges if e not in tree_set),
        relabeling=tuple(tuple(p) for p in relabel),
    )
    return Cover(g, c.fold, tuple(new_maps)), norm


def _fisher_yates(rng: np.random.Generator, k: int) -> tuple[int, ...]:
    perm = list(range(k))
    for i in range(k - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


def random_cover(g: Graph, fold: int, seed: Optional[int] = None, *, task: int = 0,
                 rng: Optional[np.random.Generator] = None) -> Cover:
    """Full cover with an independent uniform permutation on every edge.

    Either ``seed`` (with an optional ``task`` index for parallel streams) or an
    explicit ``rng`` must be given. Edges are drawn in canonical edge order.
    """
    if fold < 1:
        raise InvalidParameter("fold must be >= 1")
    if rng is None:
        if seed is None:
            raise InvalidParameter("random_cover needs a seed or an rng")
        rng = derive_rng(seed, task)
    return Cover(g, fold, tuple(_fisher_yates(rng, fold) for _ in g.edges))


def random_partial_cover(g: Graph, fold: int, rng: np.random.Generator, drop: float = 0.25) -> Cover:
    full = random_cover(g, fold, rng=rng)
    keep = rng.random((g.n_edges, fold)) >= drop
    maps = tuple(
        tuple(j if keep[k, i] else UNMATCHED for i, j in enumerate(mp))
        for k, mp in enumerate(full.maps)
    )
    return Cover(g, fold, maps)


def cover_from_list_assignment(g: Graph, lists: Sequence[Sequence]) -> Cover:
    """Cover whose (H,1)-colorings are exactly the proper colorings from ``lists``.

    Color ``i`` of ``u`` is matched to color ``j`` of ``v`` when the ``i``-th
    entry of ``lists[u]`` equals the ``j``-th entry of ``lists[v]``. Sets are
    read in sorted order.
    """
    if len(lists) != g.n:
        raise InvalidAssignment("one list per vertex required")
    ordered = [sorted(lst) if isinstance(lst, (set, frozenset)) else list(lst) for lst in lists]
    sizes = {len(lst) for lst in ordered}
    if len(sizes) != 1:
        raise InvalidAssignment(f"lists must all have the same size, got sizes {sorted(sizes)}")
    for lst in ordered:
        if len(set(lst)) != len(lst):
            raise InvalidAssignment(f"list {lst} repeats a color")
    k = sizes.pop()
    maps = []
    for u, v in g.edges:
        pos = {col: j for j, col in enumerate(ordered[v])}
        maps.append(tuple(pos.get(col, UNMATCHED) for col in ordered[u]))
    return Cover(g, k, tuple(maps))


# --- enumeration of normalized covers ---------------------------------------

def enumeration_size(g: Graph, fold: int) -> int:
    return math.factorial(fold) ** cyclomatic_rank(g)


def unrank_permutation(rank: int, k: int) -> tuple[int, ...]:
    """The ``rank``-th permutation of ``range(k)`` in lexicographic order."""
    items = list(range(k))
    out = []
    for i in range(k, 0, -1):
        f = math.factorial(i - 1)
        q, rank = divmod(rank, f)
        out.append(items.pop(q))
    return tuple(out)


def normalized_cover_at(g: Graph, fold: int, index: int) -> Cover:
    """Cover number ``index`` of :func:`enumerate_normalized_covers`."""
    tree = set(bfs_spanning_tree(g))
    cotree = [e for e in g.edges if e not in tree]
    base = math.factorial(fold)
    digits = []
    for _ in cotree:
        index, d = divmod(index, base)
        digits.append(d)
    if index:
        raise InvalidParameter("enumeration index out of range")
    digits.reverse()  # first co-tree edge is the most significant digit
    twist = dict(zip(cotree, (unrank_permutation(d, fold) for d in digits)))
    ident = tuple(range(fold))
    return Cover(g, fold, tuple(twist.get(e, ident) for e in g.edges))


def enumerate_normalized_covers(g: Graph, fold: int, budget: Optional[int] = None,
                                start: int = 0, stop: Optional[int] = None) -> Iterator[Cover]:
    """Stream every full cover with identity matchings on the canonical BFS tree.

    There are ``(fold!)**rank`` of them, co-tree permutation tuples in
    lexicographic order. Every full cover is isomorphic to exactly one cover in
    this stream's equivalence class (relabel along the tree), so it is enough
    to decide colorability here. ``start``/``stop`` select a slice of the index
    space for parallel workers.
    """
    total = enumeration_size(g, fold)
    if budget is not None and total > budget:
        raise TooLarge(f"{total} normalized covers exceed the budget of {budget}", total, budget)
    stop = total if stop is None else min(stop, total)
    tree = set(bfs_spanning_tree(g))
    cotree_pos = [k for k, e in enumerate(g.edges) if e not in tree]
    ident = tuple(range(fold))
    if start == 0 and stop == total:
        perms = list(itertools.permutations(range(fold)))
        for combo in itertools.product(perms, repeat=len(cotree_pos)):
            maps = [ident] * g.n_edges
            for k, p in zip(cotree_pos, combo):
                maps[k] = p
            yield Cover(g, fold, tuple(maps))
        return
    for idx in range(start, stop):
        yield normalized_cover_at(g, fold, idx)
