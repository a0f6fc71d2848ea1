"""Explicit (H, r)-colorings of (2r+1)-fold covers of the odd cycle C_{2r+1}.

After completing the cover, the cross-edges form a 2-regular graph H* whose
cycles all wind around the base cycle. Deleting one color from each of those
cycles (the j-th cycle loses a color at v_j) leaves paths; taking every other
vertex of each path, starting from the first, picks at least r colors at every
vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cover import Cover, complete_matchings
from .errors import ConstructionIntegrityError, InvalidParameter
from .graph_core import make_cycle
from .solver import SetColoring, verify_set_coloring

Node = tuple[int, int]  # (base vertex, color)


@dataclass(frozen=True)
class OddCycleTrace:
    r: int
    completed: Cover
    cycles: tuple[tuple[Node, ...], ...]  # even cycles first
    n_even: int
    deleted: tuple[Node, ...]
    paths: tuple[tuple[Node, ...], ...]
    k: tuple[int, ...]
    selected: tuple[Node, ...]
    tallies: tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.cycles)

    def to_json(self) -> dict:
        def nodes(seq):
            return [[v, c + 1] for v, c in seq]

        return {
            "r": self.r,
            "completed_cover": self.completed.to_json(),
            "cycles": [nodes(cyc) for cyc in self.cycles],
            "cycle_lengths": [len(cyc) for cyc in self.cycles],
            "p": self.p,
            "n_even_cycles": self.n_even,
            "deleted": nodes(self.deleted),
            "paths": [nodes(path) for path in self.paths],
            "path_lengths": [len(path) for path in self.paths],
            "k": list(self.k),
            "selected": nodes(self.selected),
            "tallies": list(self.tallies),
        }


def _decompose(c: Cover) -> list[tuple[Node, ...]]:
    """Cycles of H*, each walked in the direction v_i -> v_{i+1}."""
    n, a = c.base.n, c.fold
    step = [c.matching(i, (i + 1) % n) for i in range(n)]
    seen = [[False] * a for _ in range(n)]
    cycles = []
    for v0 in range(n):
        for c0 in range(a):
            if seen[v0][c0]:
                continue
            cyc = []
            v, col = v0, c0
            while not seen[v][col]:
                seen[v][col] = True
                cyc.append((v, col))
                v, col = (v + 1) % n, step[v][col]
            if (v, col) != (v0, c0):  # pragma: no cover - impossible for permutations
                raise AssertionError("H* walk did not close up")
            cycles.append(tuple(cyc))
    return cycles


def construct_odd_cycle_coloring(c: Cover):
    """Return ``(coloring, trace)`` for a (2r+1)-fold cover of C_{2r+1}.

    The base graph must be exactly ``make_cycle(2r+1)``. The coloring is
    verified against the input cover; a failure raises
    :class:`ConstructionIntegrityError` carrying the full trace.
    """
    n = c.base.n
    if n < 3 or n % 2 == 0 or c.base != make_cycle(n):
        raise InvalidParameter("base graph must be an odd cycle in cyclic vertex order")
    if c.fold != n:
        raise InvalidParameter(f"fold must equal the cycle length {n}, got {c.fold}")
    r = (n - 1) // 2
    full = complete_matchings(c)

    cycles = _decompose(full)
    for cyc in cycles:
        if len(cyc) % n:
            raise ConstructionIntegrityError(f"H* cycle of length {len(cyc)} is not a multiple of {n}")
    cycles = [cyc for cyc in cycles if len(cyc) % 2 == 0] + [cyc for cyc in cycles if len(cyc) % 2 == 1]
    n_even = sum(1 for cyc in cycles if len(cyc) % 2 == 0)
    p = len(cycles)
    if (p - n_even) % 2 != 1 or not 1 <= p <= n:
        raise ConstructionIntegrityError(f"unexpected cycle structure: p={p}, even={n_even}")

    deleted, paths, ks = [], [], []
    for j, cyc in enumerate(cycles):
        # j-th cycle (0-based) loses its lowest color at base vertex j
        d = min(node for node in cyc if node[0] == j)
        pos = cyc.index(d)
        forward = cyc[pos + 1:] + cyc[:pos]
        first_at = (j + 1) % n
        if forward[0][0] == first_at:
            path = forward
        elif forward[-1][0] == first_at:
            path = forward[::-1]
        else:  # pragma: no cover
            raise ConstructionIntegrityError("neither path orientation starts at the successor vertex")
        k, rem = divmod(len(path) - 2 * r, n)
        if rem or k < 0 or k % 2 != (1 if j < n_even else 0):
            raise ConstructionIntegrityError(f"path {j} has {len(path)} vertices, not (2r+1)k+2r with the right parity")
        deleted.append(d)
        paths.append(tuple(path))
        ks.append(k)
    if sum(ks) != n - p or sum(len(path) for path in paths) != n * n - p:
        raise ConstructionIntegrityError("path length identities fail")

    selected = tuple(node for path in paths for node in path[0::2])
    per_vertex: list[list[int]] = [[] for _ in range(n)]
    for v, col in selected:
        per_vertex[v].append(col)
    tallies = tuple(len(cols) for cols in per_vertex)
    trace = OddCycleTrace(r, full, tuple(cycles), n_even, tuple(deleted), tuple(paths),
                          tuple(ks), selected, tallies)

    coloring = SetColoring(r, tuple(tuple(cols) for cols in per_vertex))
    for target in (full, c):
        res = verify_set_coloring(target, coloring)
        if not res.ok:
            raise ConstructionIntegrityError(f"constructed selection fails: {res.describe()}", trace)
    return res.coloring, trace
