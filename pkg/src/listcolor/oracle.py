"""Exact ground truth for small instances.

``l_colorable`` is a plain backtracking search.  ``choosable`` enumerates list
assignments on a bipartite graph and asks, for each, whether some coloring of
one side leaves every vertex of the other side a free color.  Several
reductions keep the enumeration small; each preserves the existence of a
non-colorable assignment:

* colors of the first side are named in order of first occurrence, so the
  enumeration runs over color-renaming classes;
* a second-side list holding a color absent from all neighbor lists can
  never be blocked, so second-side lists are drawn from the neighbors' colors;
* a list blocking a subset of the first-side colorings that another list
  blocks can be swapped for the larger one, so only maximal blocking sets
  are tried;
* second-side vertices with equal neighborhoods are interchangeable and
  receive candidates in non-decreasing order.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

from .colorer import PartialColoring, verify_proper
from .errors import TooLargeToEnumerate
from .graph_core import BipartiteGraph, build_graph
from .list_model import ListAssignment

WORK_CAP = 10**7
COLORING_CAP = 1 << 20


def l_colorable(g: BipartiteGraph, assignment: ListAssignment) -> tuple[bool, PartialColoring | None]:
    """Decide L-colorability; return a witness coloring when one exists.

    Branches on the uncolored vertex with the fewest available colors (ties
    by index).
    """
    n = g.n_vertices
    color: list[int | None] = [None] * n

    def available(v: int) -> list[int]:
        used = {color[u] for u in g.neighbors(v)}
        return [c for c in assignment.lists[v] if c not in used]

    def solve(remaining: int) -> bool:
        if remaining == 0:
            return True
        best, best_opts = -1, None
        for v in range(n):
            if color[v] is None:
                opts = available(v)
                if best_opts is None or len(opts) < len(best_opts):
                    best, best_opts = v, opts
                    if not opts:
                        return False
        for c in best_opts:
            color[best] = c
            if solve(remaining - 1):
                return True
        color[best] = None
        return False

    if not solve(n):
        return False, None
    witness = PartialColoring.from_dict(n, {v: c for v, c in enumerate(color)})
    assert verify_proper(g, assignment, witness)
    return True, witness


def chromatic_number(g: BipartiteGraph) -> int:
    """Least number of colors in a proper coloring, by backtracking."""
    n = g.n_vertices
    if n == 0:
        return 0
    order = sorted(range(n), key=lambda v: (-g.degree(v), v))

    def colorable(q: int) -> bool:
        color = [-1] * n

        def place(pos: int, used: int) -> bool:
            if pos == n:
                return True
            v = order[pos]
            taken = {color[u] for u in g.neighbors(v)}
            # a fresh color is interchangeable with every other unused one
            for c in range(min(used + 1, q)):
                if c not in taken:
                    color[v] = c
                    if place(pos + 1, max(used, c + 1)):
                        return True
            color[v] = -1
            return False

        return place(0, 0)

    q = 1
    while not colorable(q):
        q += 1
    return q


def _canonical_lists(count: int, k: int, pool: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Sequences of ``count`` k-subsets with colors named by first occurrence."""

    def rec(i: int, used: int, acc: list[tuple[int, ...]]):
        if i == count:
            yield tuple(acc)
            return
        for fresh in range(0, k + 1):
            if used + fresh > pool or k - fresh > used:
                continue
            new = tuple(range(used + 1, used + fresh + 1))
            for old in itertools.combinations(range(1, used + 1), k - fresh):
                acc.append(old + new)
                yield from rec(i + 1, used + fresh, acc)
                acc.pop()

    yield from rec(0, 0, [])


def _maximal_masks(masks: dict[int, tuple[int, ...]]) -> list[tuple[int, tuple[int, ...]]]:
    items = sorted(masks.items(), key=lambda kv: (-bin(kv[0]).count("1"), kv[1]))
    keep: list[tuple[int, tuple[int, ...]]] = []
    for m, lst in items:
        if m and not any((m | km) == km for km, _ in keep):
            keep.append((m, lst))
    return keep


def choosable(g: BipartiteGraph, k: int, pool: int | None = None,
              work_cap: int = WORK_CAP) -> tuple[bool, ListAssignment | None]:
    """Whether every assignment of ``k``-subsets of ``{1..pool}`` is colorable.

    Returns ``(True, None)`` or ``(False, counterexample)``.  ``pool`` defaults
    to ``k * |V|``.  Raises :class:`TooLargeToEnumerate` once the search
    exceeds ``work_cap`` steps.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = g.n_vertices
    if pool is None:
        pool = k * n
    if pool < k:
        return True, None  # no assignment exists
    # enumerate the side with fewer non-isolated vertices
    a_side = [v for v in g.a_vertices if g.degree(v)]
    b_side = [v for v in g.b_vertices if g.degree(v)]
    first, second = (a_side, b_side) if len(a_side) <= len(b_side) else (b_side, a_side)
    if not first:
        return True, None
    if k ** len(first) > COLORING_CAP:
        raise TooLargeToEnumerate(f"{k}**{len(first)} colorings of one side exceed cap")
    pos = {v: i for i, v in enumerate(first)}

    twins: dict[tuple[int, ...], list[int]] = {}
    for v in second:
        twins.setdefault(tuple(g.neighbors(v)), []).append(v)
    classes = list(twins.items())
    work = 0

    for first_lists in _canonical_lists(len(first), k, pool):
        colorings = list(itertools.product(*first_lists))
        full = (1 << len(colorings)) - 1
        # candidate blocking sets for each twin class
        slots: list[tuple[list[int], list[tuple[int, tuple[int, ...]]]]] = []
        for nbhd, members in classes:
            idx = [pos[u] for u in nbhd]
            union = sorted(set().union(*(first_lists[i] for i in idx)))
            masks: dict[int, tuple[int, ...]] = {}
            for lst in itertools.combinations(union, k):
                s = set(lst)
                m = 0
                for j, phi in enumerate(colorings):
                    if s <= {phi[i] for i in idx}:
                        m |= 1 << j
                masks.setdefault(m, lst)
                work += 1
            slots.append((members, _maximal_masks(masks)))
        if work > work_cap:
            raise TooLargeToEnumerate(f"search exceeded {work_cap} steps")
        # vertices whose class blocks nothing keep an arbitrary list
        flat = [(ci, cands) for ci, (members, cands) in enumerate(slots) if cands
                for _ in members]
        best = max((bin(m).count("1") for _, cands in flat for m, _ in cands), default=0)
        choice: list[int] = [0] * len(flat)
        depth = 0

        def cover(t: int, acc: int) -> bool:
            nonlocal work, depth
            if acc == full:
                depth = t
                return True
            if t == len(flat):
                return False
            if (len(flat) - t) * best < bin(full & ~acc).count("1"):
                return False
            work += 1
            if work > work_cap:
                raise TooLargeToEnumerate(f"search exceeded {work_cap} steps")
            ci, cands = flat[t]
            start = choice[t - 1] if t and flat[t - 1][0] == ci else 0
            for j in range(start, len(cands)):
                choice[t] = j
                if cover(t + 1, acc | cands[j][0]):
                    return True
            return False

        if not cover(0, 0):
            continue
        return False, _counterexample(g, k, first, first_lists, slots, flat, choice[:depth])
    return True, None


def _counterexample(g, k, first, first_lists, slots, flat, chosen) -> ListAssignment:
    lists: list[tuple[int, ...]] = [tuple(range(1, k + 1))] * g.n_vertices
    for v, lst in zip(first, first_lists):
        lists[v] = lst
    for members, _ in slots:
        for v in members:
            union = sorted(set().union(*(lists[u] for u in g.neighbors(v))))
            lists[v] = tuple(union[:k])
    rank: dict[int, int] = {}
    for t, j in enumerate(chosen):
        ci, cands = flat[t]
        r = rank.get(ci, 0)
        rank[ci] = r + 1
        lists[slots[ci][0][r]] = cands[j][1]
    cx = ListAssignment(k, tuple(lists))
    ok, _ = l_colorable(g, cx)
    if ok:
        raise AssertionError("counterexample failed verification")
    return cx


def choosability(g: BipartiteGraph, pool: int | None = None, work_cap: int = WORK_CAP) -> int:
    """Least ``k`` for which ``g`` is ``k``-choosable.

    ``k = maxdeg + 1`` always suffices (greedy), so the search stops there.
    """
    top = g.delta + 1
    for k in range(1, top):
        ok, _ = choosable(g, k, pool, work_cap)
        if ok:
            return k
    return top


def complete_bipartite(m: int, n: int) -> BipartiteGraph:
    return build_graph(m, n, [(i, j) for i in range(m) for j in range(n)])


def even_cycle(length: int) -> BipartiteGraph:
    """Cycle on ``length`` vertices alternating between the parts."""
    if length < 4 or length % 2:
        raise ValueError("length must be an even number >= 4")
    h = length // 2
    edges = [(i, i) for i in range(h)] + [(i, (i + 1) % h) for i in range(h)]
    return build_graph(h, h, edges)
