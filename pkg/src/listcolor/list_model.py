"""List assignments and the per-vertex overlap statistics of part B."""

from __future__ import annotations

import bisect
import csv
import io
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import FormatError, PoolTooSmall, WrongPart
from .graph_core import BipartiteGraph
from .seeding import make_rng


@dataclass(frozen=True)
class ListAssignment:
    k: int
    lists: tuple[tuple[int, ...], ...]
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lists = tuple(tuple(int(c) for c in lst) for lst in self.lists)
        for v, lst in enumerate(lists):
            if len(lst) != self.k:
                raise ValueError(f"list of vertex {v} has size {len(lst)}, expected {self.k}")
            if any(b <= a for a, b in zip(lst, lst[1:])):
                raise ValueError(f"list of vertex {v} is not strictly increasing")
        object.__setattr__(self, "lists", lists)
        arr = np.array(lists, dtype=np.int64).reshape(len(lists), self.k)
        arr.flags.writeable = False
        object.__setattr__(self, "_array", arr)

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]]) -> "ListAssignment":
        lists = [sorted(int(c) for c in lst) for lst in lists]
        k = len(lists[0]) if lists else 0
        return cls(k, tuple(tuple(lst) for lst in lists))

    @property
    def array(self) -> np.ndarray:
        """``(n_vertices, k)`` read-only integer array of the lists."""
        return self._array

    def __len__(self) -> int:
        return len(self.lists)

    def __getitem__(self, v: int) -> tuple[int, ...]:
        return self.lists[v]


def index_of(assignment: ListAssignment, v: int, c: int) -> int | None:
    """1-based position of ``c`` in ``L(v)``, or ``None``."""
    lst = assignment.lists[v]
    i = bisect.bisect_left(lst, c)
    if i < len(lst) and lst[i] == c:
        return i + 1
    return None


def shared_count(assignment: ListAssignment, v: int, w: int) -> int:
    """``|L(v) & L(w)|`` by a sorted merge."""
    x, y = assignment.lists[v], assignment.lists[w]
    i = j = n = 0
    while i < len(x) and j < len(y):
        if x[i] == y[j]:
            n += 1
            i += 1
            j += 1
        elif x[i] < y[j]:
            i += 1
        else:
            j += 1
    return n


def _require_b(g: BipartiteGraph, w: int) -> None:
    if not g.in_b(w):
        raise WrongPart(f"vertex {w} is not in part B")


def weight(assignment: ListAssignment, g: BipartiteGraph, w: int) -> int:
    """``Z(w)``: total list overlap of ``w`` with its neighbors."""
    _require_b(g, w)
    return sum(shared_count(assignment, v, w) for v in g.neighbors(w))


@dataclass(frozen=True)
class WeightStats:
    """Exact overlap statistics of one B-vertex.

    ``z``, ``y``, ``alpha`` and ``ell_bar`` are exact fractions; ``ell_bar`` is
    ``None`` when every neighbor has high overlap.
    """

    w: int
    shared: dict[int, int]
    big_z: int
    z: Fraction
    y: Fraction
    alpha: Fraction
    n_prime: frozenset[int]
    n_dprime: frozenset[int]
    ell_bar: Fraction | None

    def as_row(self) -> dict[str, float | int]:
        return {
            "w": self.w,
            "Z": self.big_z,
            "z": float(self.z),
            "y": float(self.y),
            "alpha": float(self.alpha),
            "ell_bar": float("nan") if self.ell_bar is None else float(self.ell_bar),
        }


def high_overlap_threshold(k: int) -> int:
    """Neighbors with ``ell > floor(9k/10)`` count as high-overlap."""
    return (9 * k) // 10


def weight_stats(assignment: ListAssignment, g: BipartiteGraph, w: int) -> WeightStats:
    _require_b(g, w)
    k = assignment.k
    delta = g.delta
    shared = {v: shared_count(assignment, v, w) for v in g.neighbors(w)}
    big_z = sum(shared.values())
    thr = high_overlap_threshold(k)
    n_prime = frozenset(v for v, ell in shared.items() if ell > thr)
    n_dprime = frozenset(shared) - n_prime
    scale = delta * k
    if scale == 0:
        z = y = alpha = Fraction(0)
    else:
        z = Fraction(big_z, scale)
        y = Fraction(len(n_prime), delta)
        excess = sum(Fraction(shared[v]) - Fraction(9 * k, 10) for v in n_prime)
        alpha = excess / (y * scale) if n_prime else Fraction(0)
    ell_bar = Fraction(sum(shared[v] for v in n_dprime), len(n_dprime)) if n_dprime else None
    return WeightStats(w, shared, big_z, z, y, alpha, n_prime, n_dprime, ell_bar)


def gen_lists(
    g: BipartiteGraph,
    k: int,
    pool: int,
    mode: str = "independent-uniform",
    seed: int | None = None,
    theta: float | None = None,
) -> ListAssignment:
    """Random lists of size ``k`` for every vertex of ``g``.

    ``independent-uniform``: a uniform ``k``-subset of ``{1..pool}`` per vertex.

    ``planted-overlap``: every list is a uniform ``k``-subset of one shared
    window of ``W = max(k, round(k/theta))`` colors (itself a random
    ``W``-subset of ``{1..pool}``), so each edge overlaps in ``k*k/W ~ theta*k``
    colors on average.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if pool < k:
        raise PoolTooSmall(f"pool={pool} < k={k}")
    rng = make_rng(seed)
    n = g.n_vertices
    if mode == "independent-uniform":
        palette = np.arange(1, pool + 1)
    elif mode == "planted-overlap":
        if theta is None or not (0 < theta <= 1):
            raise ValueError("planted-overlap needs 0 < theta <= 1")
        width = max(k, round(k / theta))
        if width > pool:
            raise PoolTooSmall(f"planted window {width} exceeds pool={pool}")
        palette = np.sort(rng.choice(pool, size=width, replace=False)) + 1
    else:
        raise ValueError(f"unknown list mode {mode!r}")
    # argsort of iid keys gives a uniform random k-subset per row
    keys = rng.random((n, len(palette)))
    picks = np.sort(np.argsort(keys, axis=1)[:, :k], axis=1)
    arr = palette[picks]
    return ListAssignment(k, tuple(tuple(int(c) for c in row) for row in arr))


def expected_uniform_overlap(k: int, pool: int) -> float:
    """Mean of a hypergeometric overlap of two uniform ``k``-subsets."""
    return k * k / pool


def uniform_overlap_variance(k: int, pool: int) -> float:
    if pool <= 1:
        return 0.0
    p = k / pool
    return k * p * (1 - p) * (pool - k) / (pool - 1)


def format_lists(assignment: ListAssignment) -> str:
    lines = [f"lists {len(assignment)} {assignment.k}"]
    lines.extend(" ".join(str(c) for c in lst) for lst in assignment.lists)
    return "\n".join(lines) + "\n"


def parse_lists(text: str) -> ListAssignment:
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise FormatError("empty list file", 1)
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "lists":
        raise FormatError("expected header 'lists <vertex_count> <k>'", lineno)
    try:
        count, k = int(parts[1]), int(parts[2])
    except ValueError:
        raise FormatError("non-integer header field", lineno) from None
    body = rows[1:]
    if len(body) != count:
        raise FormatError(f"header declares {count} vertices, found {len(body)}", lineno)
    lists = []
    for lineno, ln in body:
        try:
            lst = [int(x) for x in ln.split()]
        except ValueError:
            raise FormatError("non-integer color", lineno) from None
        if len(lst) != k:
            raise FormatError(f"list has {len(lst)} colors, expected {k}", lineno)
        if any(b <= a for a, b in zip(lst, lst[1:])):
            raise FormatError("colors not strictly increasing", lineno)
        lists.append(tuple(lst))
    return ListAssignment(k, tuple(lists))


def read_lists(path: str | os.PathLike) -> ListAssignment:
    with open(path, encoding="utf-8") as fh:
        return parse_lists(fh.read())


def write_lists(assignment: ListAssignment, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_lists(assignment))


STATS_COLUMNS = ("w", "Z", "z", "y", "alpha", "ell_bar")


def stats_csv(assignment: ListAssignment, g: BipartiteGraph) -> str:
    """CSV ``w,Z,z,y,alpha,ell_bar`` over all of part B."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=STATS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for w in g.b_vertices:
        row = weight_stats(assignment, g, w).as_row()
        writer.writerow({k: (repr(v) if isinstance(v, float) and not math.isnan(v) else v)
                         for k, v in row.items()})
    return buf.getvalue()
