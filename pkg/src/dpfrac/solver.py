"""Verification of and exact search for (H,b)-colorings.

An (H,b)-coloring picks at least ``b`` colors at every vertex so that no
cross-edge of the cover joins two picked colors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .cover import UNMATCHED, Cover
from .errors import InfeasibleTrivially, InvalidColor, InvalidParameter, MalformedInput


@dataclass(frozen=True)
class SetColoring:
    b: int
    selection: tuple[tuple[int, ...], ...]
    verified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "selection", tuple(tuple(sorted(set(s))) for s in self.selection))

    def trimmed(self) -> "SetColoring":
        """Same coloring keeping only the ``b`` lowest colors at each vertex."""
        return SetColoring(self.b, tuple(s[: self.b] for s in self.selection), self.verified)

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "selection": {str(v): [c + 1 for c in s] for v, s in enumerate(self.selection)},
        }

    @classmethod
    def from_json(cls, data, n: Optional[int] = None) -> "SetColoring":
        if not isinstance(data, dict):
            raise MalformedInput("coloring must be an object")
        b = data.get("b")
        if not isinstance(b, int) or isinstance(b, bool):
            raise MalformedInput("expected integer", "$.b")
        sel = data.get("selection")
        if not isinstance(sel, dict):
            raise MalformedInput("expected object keyed by vertex", "$.selection")
        keys = {}
        for k, cols in sel.items():
            if not k.isdigit():
                raise MalformedInput("vertex keys must be decimal integers", f"$.selection.{k}")
            if not isinstance(cols, list) or not all(isinstance(x, int) for x in cols):
                raise MalformedInput("expected list of integers", f"$.selection.{k}")
            keys[int(k)] = [x - 1 for x in cols]
        size = n if n is not None else (max(keys) + 1 if keys else 0)
        missing = [v for v in range(size) if v not in keys]
        if missing:
            raise MalformedInput("vertex missing from selection", f"$.selection.{missing[0]}")
        return cls(b, tuple(tuple(keys[v]) for v in range(size)))


@dataclass(frozen=True)
class Verification:
    kind: str  # "ok" | "violation" | "deficient"
    edge: Optional[tuple[int, int]] = None
    colors: Optional[tuple[int, int]] = None
    vertex: Optional[int] = None
    coloring: Optional[SetColoring] = None

    @property
    def ok(self) -> bool:
        return self.kind == "ok"

    def describe(self) -> str:
        if self.kind == "ok":
            return "ok"
        if self.kind == "violation":
            (u, v), (i, j) = self.edge, self.colors
            return f"violation: edge ({u},{v}) joins color {i + 1} of {u} to color {j + 1} of {v}"
        return f"deficient: vertex {self.vertex} has fewer than b colors"


def verify_set_coloring(c: Cover, s: SetColoring) -> Verification:
    """Check a selection against a cover; report the first problem found.

    Cross-edge violations are reported before deficiencies, edges in canonical
    order and colors of the lower endpoint in increasing order.
    """
    if len(s.selection) != c.base.n:
        raise InvalidParameter(f"selection covers {len(s.selection)} vertices, graph has {c.base.n}")
    for v, sel in enumerate(s.selection):
        for col in sel:
            if not 0 <= col < c.fold:
                raise InvalidColor(f"vertex {v} selects color {col + 1} outside [1,{c.fold}]")
    chosen = [set(sel) for sel in s.selection]
    for (u, v), mp in zip(c.base.edges, c.maps):
        for i in sorted(chosen[u]):
            j = mp[i]
            if j != UNMATCHED and j in chosen[v]:
                return Verification("violation", edge=(u, v), colors=(i, j))
    for v, sel in enumerate(chosen):
        if len(sel) < s.b:
            return Verification("deficient", vertex=v)
    return Verification("ok", coloring=replace(s, verified=True))


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "none" | "unknown"
    coloring: Optional[SetColoring]
    nodes: int


class _BudgetExhausted(Exception):
    pass


def find_coloring(c: Cover, b: int, budget: Optional[int] = None, order: str = "mrv") -> SearchResult:
    """Exact backtracking search for an (H,b)-coloring with exactly ``b`` colors per vertex.

    ``order="mrv"`` branches on the vertex with the fewest free colors (ties by
    index); ``order="static"`` uses plain index order and serves as an
    independent second search. ``"none"`` is only returned after the search
    tree has been exhausted; hitting ``budget`` nodes yields ``"unknown"``.
    """
    if b < 0:
        raise InvalidParameter("b must be >= 0")
    if b > c.fold:
        raise InfeasibleTrivially(f"b={b} exceeds fold {c.fold}")
    if order not in ("mrv", "static"):
        raise InvalidParameter(f"unknown variable order {order!r}")
    n, a = c.base.n, c.fold
    if b == 0:
        return SearchResult("found", verify_set_coloring(c, SetColoring(0, ((),) * n)).coloring, 0)

    # bits[v] lists (w, image) where image[i] is the bit of w's color matched to color i of v
    bits = [
        [(w, tuple(0 if j == UNMATCHED else 1 << j for j in c.matching(v, w))) for w in c.base.neighbors(v)]
        for v in range(n)
    ]
    forb = [0] * n
    chosen: list[Optional[tuple[int, ...]]] = [None] * n
    nodes = 0

    def pick() -> int:
        best, best_free = -1, a + 1
        for v in range(n):
            if chosen[v] is None:
                if order == "static":
                    return v
                free = a - forb[v].bit_count()
                if free < best_free:
                    best, best_free = v, free
        return best

    def extend(depth: int) -> bool:
        nonlocal nodes
        if depth == n:
            return True
        v = pick()
        fv = forb[v]
        free = [i for i in range(a) if not (fv >> i) & 1]
        for combo in itertools.combinations(free, b):
            nodes += 1
            if budget is not None and nodes > budget:
                raise _BudgetExhausted
            changes = []
            alive = True
            for w, img in bits[v]:
                if chosen[w] is not None:
                    continue
                m = 0
                for i in combo:
                    m |= img[i]
                add = m & ~forb[w]
                if add:
                    forb[w] |= add
                    changes.append((w, add))
                    if a - forb[w].bit_count() < b:
                        alive = False
                        break
            if alive:
                chosen[v] = combo
                if extend(depth + 1):
                    return True
                chosen[v] = None
            for w, add in changes:
                forb[w] &= ~add
        return False

    try:
        found = extend(0)
    except _BudgetExhausted:
        return SearchResult("unknown", None, nodes)
    if not found:
        return SearchResult("none", None, nodes)
    res = verify_set_coloring(c, SetColoring(b, tuple(chosen)))
    if not res.ok:  # pragma: no cover - would mean the propagation is wrong
        raise AssertionError(f"search produced an invalid coloring: {res.describe()}")
    return SearchResult("found", res.coloring, nodes)
