"""Bipartite graphs with dense integer vertices.

Vertices are numbered globally: part A is ``0 .. a_size-1`` and part B is
``a_size .. a_size+b_size-1``.  Edge lists handed to :func:`build_graph` use
part-local indices ``(a_idx, b_idx)`` unless ``indexing="global"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    FormatError,
    IndexOutOfRange,
    InfeasibleDegree,
    NonBipartiteEdge,
    RetryExhausted,
)
from .seeding import make_rng

MATCHING_RETRY_CAP = 1000


@dataclass(frozen=True)
class BipartiteGraph:
    a_size: int
    b_size: int
    adjacency: tuple[tuple[int, ...], ...]
    delta: int

    @property
    def n_vertices(self) -> int:
        return self.a_size + self.b_size

    @property
    def a_vertices(self) -> range:
        return range(self.a_size)

    @property
    def b_vertices(self) -> range:
        return range(self.a_size, self.a_size + self.b_size)

    def in_a(self, v: int) -> bool:
        return 0 <= v < self.a_size

    def in_b(self, v: int) -> bool:
        return self.a_size <= v < self.n_vertices

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def b_index(self, w: int) -> int:
        return w - self.a_size

    def edges(self) -> list[tuple[int, int]]:
        """Sorted part-local ``(a_idx, b_idx)`` pairs."""
        return [(v, w - self.a_size) for v in self.a_vertices for w in self.adjacency[v]]

    def edge_count(self) -> int:
        return sum(len(self.adjacency[v]) for v in self.a_vertices)


def max_degree(g: BipartiteGraph) -> int:
    return max((len(nb) for nb in g.adjacency), default=0)


def build_graph(
    a_size: int,
    b_size: int,
    edges: Iterable[Sequence[int]],
    indexing: str = "part",
) -> BipartiteGraph:
    """Validate an edge list and return the graph.

    With ``indexing="global"`` each pair holds global vertex ids in either
    order, and a pair inside one part raises :class:`NonBipartiteEdge`.
    """
    if a_size < 0 or b_size < 0:
        raise IndexOutOfRange("part sizes must be non-negative")
    if indexing not in ("part", "global"):
        raise ValueError(f"unknown indexing {indexing!r}")
    n = a_size + b_size
    adj: list[set[int]] = [set() for _ in range(n)]
    for pair in edges:
        x, y = int(pair[0]), int(pair[1])
        if indexing == "part":
            if not (0 <= x < a_size) or not (0 <= y < b_size):
                raise IndexOutOfRange(f"edge ({x}, {y}) out of range for parts {a_size}+{b_size}")
            u, w = x, a_size + y
        else:
            if not (0 <= x < n) or not (0 <= y < n):
                raise IndexOutOfRange(f"edge ({x}, {y}) out of range for {n} vertices")
            if (x < a_size) == (y < a_size):
                raise NonBipartiteEdge(f"edge ({x}, {y}) lies inside one part")
            u, w = min(x, y), max(x, y)
        if w in adj[u]:
            raise DuplicateEdge(f"edge ({x}, {y}) given twice")
        adj[u].add(w)
        adj[w].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in adj)
    return BipartiteGraph(a_size, b_size, adjacency, max((len(s) for s in adj), default=0))


def _from_b_sets(n_a: int, n_b: int, nbrs: list[set[int]]) -> BipartiteGraph:
    edges = [(v, j) for v in range(n_a) for j in sorted(nbrs[v])]
    return build_graph(n_a, n_b, edges)


def _random_matching(n: int, used: list[set[int]], rng: np.random.Generator) -> np.ndarray:
    """A uniformly shuffled perfect matching, repaired by transpositions so
    that it avoids every edge in ``used``."""
    perm = rng.permutation(n)
    bad = {i for i in range(n) if int(perm[i]) in used[i]}
    attempts = 0
    while bad:
        attempts += 1
        if attempts > MATCHING_RETRY_CAP:
            raise RetryExhausted(f"matching repair exceeded {MATCHING_RETRY_CAP} attempts")
        i = min(bad)
        j = int(rng.integers(n))
        if j == i:
            continue
        pi, pj = int(perm[i]), int(perm[j])
        if pj in used[i] or pi in used[j]:
            continue
        perm[i], perm[j] = pj, pi
        bad.discard(i)
        bad.discard(j)
    return perm


def gen_regular_bipartite(n: int, delta: int, seed: int | None) -> BipartiteGraph:
    """Random ``delta``-regular simple bipartite graph on ``n + n`` vertices.

    Superposes ``delta`` random perfect matchings; a matching that hits an
    existing edge is repaired by random transpositions (at most 1000 per
    matching).  For ``delta > n/2`` the complement of an
    ``(n - delta)``-regular sample is returned instead.
    """
    if delta < 1 or n < 1:
        raise InfeasibleDegree(f"need 1 <= delta <= n, got n={n}, delta={delta}")
    if delta > n:
        raise InfeasibleDegree(f"delta={delta} exceeds part size n={n}")
    rng = make_rng(seed)
    complement = 2 * delta > n
    d = n - delta if complement else delta
    used: list[set[int]] = [set() for _ in range(n)]
    for _ in range(d):
        perm = _random_matching(n, used, rng)
        for i in range(n):
            used[i].add(int(perm[i]))
    if complement:
        full = set(range(n))
        used = [full - s for s in used]
    return _from_b_sets(n, n, used)


def format_graph(g: BipartiteGraph) -> str:
    edges = g.edges()
    lines = [f"bipartite {g.a_size} {g.b_size} {len(edges)}"]
    lines.extend(f"{a} {b}" for a, b in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BipartiteGraph:
    """Parse the ``bipartite <a> <b> <m>`` text format."""
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise FormatError("empty graph file", 1)
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "bipartite":
        raise FormatError("expected header 'bipartite <a_size> <b_size> <edge_count>'", lineno)
    try:
        a_size, b_size, m = (int(x) for x in parts[1:])
    except ValueError:
        raise FormatError("non-integer header field", lineno) from None
    if min(a_size, b_size, m) < 0:
        raise FormatError("negative header field", lineno)
    body = rows[1:]
    if len(body) != m:
        raise FormatError(f"header declares {m} edges, found {len(body)}", lineno)
    edges = []
    seen = set()
    for lineno, ln in body:
        fields = ln.split()
        if len(fields) != 2:
            raise FormatError("expected 'a_idx b_idx'", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError("non-integer vertex index", lineno) from None
        if not (0 <= a < a_size and 0 <= b < b_size):
            raise FormatError(f"edge ({a}, {b}) out of range", lineno)
        if (a, b) in seen:
            raise FormatError(f"duplicate edge ({a}, {b})", lineno)
        seen.add((a, b))
        edges.append((a, b))
    return build_graph(a_size, b_size, edges)


def read_graph(path: str | os.PathLike) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: BipartiteGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
