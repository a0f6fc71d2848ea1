"""Finite simple graphs, the generators used throughout, and structural predicates."""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import InvalidParameter, MalformedInput, NotConnected

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices ``0..n-1``.

    ``edges`` is stored sorted with ``u < v`` in every pair. ``parts`` holds the
    partite sets ``(A, B)`` for graphs built by :func:`make_complete_bipartite`.
    """

    n: int
    edges: tuple[Edge, ...]
    parts: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("a graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParameter(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise InvalidParameter(f"loop at vertex {u}")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise InvalidParameter(f"parallel edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        if self.parts is not None:
            a, b = (tuple(p) for p in self.parts)
            if sorted(a + b) != list(range(self.n)):
                raise InvalidParameter("partite sets must partition the vertex set")
            object.__setattr__(self, "parts", (a, b))
        if self.labels is not None and len(self.labels) != self.n:
            raise InvalidParameter("one label per vertex required")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_set

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def to_json(self) -> dict:
        out = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.parts is not None:
            out["parts"] = {"A": list(self.parts[0]), "B": list(self.parts[1])}
        return out

    @classmethod
    def from_json(cls, data) -> "Graph":
        if not isinstance(data, dict):
            raise MalformedInput("graph must be an object")
        if not isinstance(data.get("n"), int) or isinstance(data.get("n"), bool):
            raise MalformedInput("expected integer", "$.n")
        edges = data.get("edges")
        if not isinstance(edges, list):
            raise MalformedInput("expected list of pairs", "$.edges")
        for i, e in enumerate(edges):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
                raise MalformedInput("expected [u, v]", f"$.edges[{i}]")
        parts = None
        if data.get("parts") is not None:
            p = data["parts"]
            if not (isinstance(p, dict) and isinstance(p.get("A"), list) and isinstance(p.get("B"), list)):
                raise MalformedInput("expected {\"A\": [...], \"B\": [...]}", "$.parts")
            parts = (tuple(p["A"]), tuple(p["B"]))
        return cls(data["n"], tuple(tuple(e) for e in edges), parts)


# --- generators -----------------------------------------------------------

def make_cycle(n: int) -> Graph:
    """C_n with vertices in cyclic order 0, 1, ..., n-1."""
    if n < 3:
        raise InvalidParameter(f"a cycle needs n >= 3, got {n}")
    edges = tuple((i, (i + 1) % n) for i in range(n))
    return Graph(n, edges, labels=tuple(f"v{i + 1}" for i in range(n)))


def make_path(n: int) -> Graph:
    if n < 1:
        raise InvalidParameter(f"a path needs n >= 1, got {n}")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)),
                 labels=tuple(f"v{i + 1}" for i in range(n)))


def make_complete_bipartite(n: int, m: int) -> Graph:
    """K_{n,m}; vertices 0..n-1 form A = {v_1..v_n}, n..n+m-1 form B = {u_1..u_m}."""
    if n < 1 or m < 1:
        raise InvalidParameter(f"K_(n,m) needs n, m >= 1, got ({n},{m})")
    a = tuple(range(n))
    b = tuple(range(n, n + m))
    edges = tuple((i, j) for i in a for j in b)
    labels = tuple(f"v{i + 1}" for i in range(n)) + tuple(f"u{j + 1}" for j in range(m))
    return Graph(n + m, edges, (a, b), labels)


def from_edges(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    return Graph(n, tuple((int(u), int(v)) for u, v in edges))


def parse_graph(spec: str) -> Graph:
    """Parse ``cycle:<n>``, ``path:<n>``, ``kbip:<n>,<m>`` or a path to a Graph JSON file."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "cycle":
            return make_cycle(int(arg))
        if kind == "path":
            return make_path(int(arg))
        if kind == "kbip":
            n, m = (int(x) for x in arg.split(","))
            return make_complete_bipartite(n, m)
    except ValueError as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(f"cannot parse graph spec {spec!r}") from exc
    p = Path(spec)
    if not p.exists():
        raise InvalidParameter(f"unknown graph generator or missing file: {spec!r}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON ({exc.msg})") from exc
    return Graph.from_json(data)


# --- structure --------------------------------------------------------------

def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(components(g)) == 1


def is_bipartite(g: Graph) -> bool:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if side[w] < 0:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def cyclomatic_rank(g: Graph) -> int:
    """Dimension of the cycle space, |E| - |V| + #components."""
    return g.n_edges - g.n + len(components(g))


def bfs_spanning_tree(g: Graph) -> tuple[Edge, ...]:
    """Canonical spanning forest: BFS from the lowest vertex of each component,
    neighbours visited in index order. Edges returned as sorted pairs."""
    seen = [False] * g.n
    tree = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    tree.append((min(v, w), max(v, w)))
                    queue.append(w)
    return tuple(sorted(tree))


class FractionalDPTwo(enum.Enum):
    AT_MOST_TWO_ATTAINED = "AtMostTwoAttained"
    EXACTLY_TWO_NOT_ATTAINED = "ExactlyTwoNotAttained"
    GREATER_THAN_TWO = "GreaterThanTwo"


def classify_fractional_dp_two(g: Graph) -> FractionalDPTwo:
    """Where a connected graph sits relative to fractional DP-chromatic number 2.

    Forests are reported as attaining the bound (an edgeless vertex actually has
    value 1; the exact value is left to the decision procedures). A bipartite
    graph with cycle-space rank one has exactly one cycle, and it is even.
    """
    if not is_connected(g):
        raise NotConnected("classification is defined for connected graphs only")
    rank = cyclomatic_rank(g)
    if rank == 0:
        return FractionalDPTwo.AT_MOST_TWO_ATTAINED
    if rank == 1 and is_bipartite(g):
        return FractionalDPTwo.EXACTLY_TWO_NOT_ATTAINED
    return FractionalDPTwo.GREATER_THAN_TWO


def degeneracy(g: Graph) -> int:
    alive = set(range(g.n))
    deg = [g.degree(v) for v in range(g.n)]
    best = 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        best = max(best, deg[v])
        alive.remove(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
    return best
