"""Randomized one-sided list coloring with local resampling.

Part A is colored independently from the bias profile.  A B-vertex ``w`` is
*bad* when every color of ``L(w)`` appears on some neighbor.  Bad vertices
are repaired by redrawing the colors of their A-neighbors (the variables the
event depends on) until no vertex is bad; B is then colored greedily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bias import BiasProfile, index_cdf
from .errors import NoAvailableColor, SideAIncomplete
from .graph_core import BipartiteGraph
from .list_model import ListAssignment
from .seeding import make_rng


class PartialColoring:
    """Colors of a subset of the vertices, stored densely."""

    __slots__ = ("color", "colored")

    def __init__(self, n: int):
        self.color = np.zeros(n, dtype=np.int64)
        self.colored = np.zeros(n, dtype=bool)

    @classmethod
    def from_dict(cls, n: int, mapping: dict[int, int]) -> "PartialColoring":
        pc = cls(n)
        for v, c in mapping.items():
            pc[v] = c
        return pc

    def copy(self) -> "PartialColoring":
        pc = PartialColoring(len(self.color))
        pc.color[:] = self.color
        pc.colored[:] = self.colored
        return pc

    def __len__(self) -> int:
        return len(self.color)

    def __getitem__(self, v: int) -> int | None:
        return int(self.color[v]) if self.colored[v] else None

    def __setitem__(self, v: int, c: int) -> None:
        self.color[v] = c
        self.colored[v] = True

    def __contains__(self, v: int) -> bool:
        return bool(self.colored[v])

    def as_dict(self) -> dict[int, int]:
        return {int(v): int(self.color[v]) for v in np.flatnonzero(self.colored)}

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialColoring) and self.as_dict() == other.as_dict()

    def __repr__(self) -> str:
        return f"PartialColoring({self.as_dict()})"


@dataclass
class RunReport:
    success: bool
    rounds: int
    resampled_events: int
    seed: int | None
    bad_history: list[int] = field(default_factory=list)
    final_bad: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "status": "ok" if self.success else "rounds_exhausted",
            "rounds": self.rounds,
            "resampled_events": self.resampled_events,
            "seed": self.seed,
            "bad_history": list(self.bad_history),
            "final_bad": list(self.final_bad),
        }


def _draw(assignment: ListAssignment, profile: BiasProfile, vertices, rng, coloring) -> None:
    vertices = np.asarray(vertices, dtype=np.int64)
    if vertices.size == 0:
        return
    cdf = index_cdf(profile, assignment.k)
    idx = np.searchsorted(cdf, rng.random(vertices.size), side="right")
    np.minimum(idx, assignment.k - 1, out=idx)
    coloring.color[vertices] = assignment.array[vertices, idx]
    coloring.colored[vertices] = True


def random_color_side_a(g: BipartiteGraph, assignment: ListAssignment, profile: BiasProfile,
                        seed: int | np.random.Generator | None) -> PartialColoring:
    """Color every A-vertex independently; B stays uncolored."""
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    coloring = PartialColoring(g.n_vertices)
    _draw(assignment, profile, np.arange(g.a_size), rng, coloring)
    return coloring


def is_bad(g: BipartiteGraph, assignment: ListAssignment, coloring: PartialColoring, w: int) -> bool:
    used = {int(coloring.color[v]) for v in g.neighbors(w)}
    return all(c in used for c in assignment.lists[w])


def bad_vertices(g: BipartiteGraph, assignment: ListAssignment, coloring: PartialColoring) -> list[int]:
    """B-vertices whose whole list is used on their neighbors (ascending)."""
    if g.a_size and not coloring.colored[: g.a_size].all():
        raise SideAIncomplete("every A-vertex must be colored")
    return [w for w in g.b_vertices if is_bad(g, assignment, coloring, w)]


def extend_to_b(g: BipartiteGraph, assignment: ListAssignment, coloring: PartialColoring) -> PartialColoring:
    """Give every B-vertex the least list color unused by its neighbors."""
    out = coloring.copy()
    for w in g.b_vertices:
        used = {int(coloring.color[v]) for v in g.neighbors(w)}
        for c in assignment.lists[w]:
            if c not in used:
                out[w] = c
                break
        else:
            raise NoAvailableColor(f"vertex {w} has no available color")
    return out


def verify_proper(g: BipartiteGraph, assignment: ListAssignment, coloring: PartialColoring) -> bool:
    """Total, on-list and without a monochromatic edge."""
    if not coloring.colored.all():
        return False
    for v in range(g.n_vertices):
        c = int(coloring.color[v])
        if c not in assignment.lists[v]:
            return False
    for v in g.a_vertices:
        c = coloring.color[v]
        for w in g.neighbors(v):
            if coloring.color[w] == c:
                return False
    return True


def lll_condition(dependency_degree: int, event_prob: float) -> bool:
    """Symmetric local lemma condition ``4 D p <= 1``."""
    if not (0.0 <= event_prob <= 1.0):
        raise ValueError("event_prob must lie in [0, 1]")
    return 4 * dependency_degree * event_prob <= 1


@dataclass(frozen=True)
class LLLInstantiation:
    delta: int
    dependency_degree: int
    event_prob: float
    product: float
    holds: bool


def lll_instantiation(delta: int) -> LLLInstantiation:
    """Bad-event parameters for max degree ``delta``: fewer than ``delta**2``
    dependencies, probability ``exp(-log(delta)**2)``."""
    if delta < 1:
        raise ValueError("delta must be positive")
    d = delta * delta
    p = math.exp(-math.log(delta) ** 2)
    return LLLInstantiation(delta, d, p, 4 * d * p, lll_condition(d, p))


def resample_round(g: BipartiteGraph, assignment: ListAssignment, profile: BiasProfile,
                   coloring: PartialColoring, bad: list[int], rng: np.random.Generator) -> tuple[int, set[int]]:
    """One repair pass over ``bad`` in ascending order, in place.

    A vertex that stopped being bad after earlier repairs in the same pass is
    skipped.  Returns the number of events resampled and the A-vertices drawn.
    """
    events = 0
    touched: set[int] = set()
    for w in sorted(bad):
        if not is_bad(g, assignment, coloring, w):
            continue
        nbrs = g.neighbors(w)
        _draw(assignment, profile, nbrs, rng, coloring)
        touched.update(nbrs)
        events += 1
    return events, touched


def moser_tardos_color(g: BipartiteGraph, assignment: ListAssignment, profile: BiasProfile,
                       max_rounds: int | None = None,
                       seed: int | None = None) -> tuple[PartialColoring | None, RunReport]:
    """Color A at random, repair bad B-vertices, then extend to B.

    The initial draw is round 1 and each repair pass adds one round;
    ``bad_history[r]`` is the bad count after round ``r + 1``.  Returns
    ``(coloring, report)``; on exhaustion the coloring is ``None`` and
    ``report.success`` is false.  ``max_rounds`` defaults to ``100 * |B|``.
    """
    if max_rounds is None:
        max_rounds = max(1, 100 * g.b_size)
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    rng = make_rng(seed)
    coloring = random_color_side_a(g, assignment, profile, rng)
    bad = bad_vertices(g, assignment, coloring)
    history = [len(bad)]
    rounds = 1
    events = 0
    while bad:
        if rounds >= max_rounds:
            return None, RunReport(False, rounds, events, seed, history, bad)
        rounds += 1
        n, _ = resample_round(g, assignment, profile, coloring, bad, rng)
        events += n
        bad = bad_vertices(g, assignment, coloring)
        history.append(len(bad))
    full = extend_to_b(g, assignment, coloring)
    ok = verify_proper(g, assignment, full)
    return (full if ok else None), RunReport(ok, rounds, events, seed, history, [])


def format_coloring(coloring: PartialColoring) -> str:
    return "".join(f"{v} {c}\n" for v, c in sorted(coloring.as_dict().items()))


# -- vectorized path for experiments -------------------------------------------------------


def neighbor_table(g: BipartiteGraph) -> np.ndarray:
    """``(|B|, max_deg)`` A-neighbor indices of each B-vertex, padded with ``a_size``."""
    width = max((g.degree(w) for w in g.b_vertices), default=0)
    table = np.full((g.b_size, max(width, 1)), g.a_size, dtype=np.int64)
    for j, w in enumerate(g.b_vertices):
        nb = g.neighbors(w)
        table[j, : len(nb)] = nb
    return table


def draw_side_a_batch(assignment: ListAssignment, profile: BiasProfile, a_size: int,
                      uniforms: np.ndarray) -> np.ndarray:
    """Map ``(trials, a_size)`` uniforms to A-colors through the profile CDF.

    Feeding the same uniforms to two profiles gives common-random-number pairs.
    """
    cdf = index_cdf(profile, assignment.k)
    idx = np.minimum(np.searchsorted(cdf, uniforms, side="right"), assignment.k - 1)
    return assignment.array[np.arange(a_size)[None, :], idx]


def count_bad_batch(g: BipartiteGraph, assignment: ListAssignment, a_colors: np.ndarray,
                    table: np.ndarray | None = None, chunk_cells: int = 1 << 22) -> np.ndarray:
    """Bad B-vertex count for each row of ``(trials, a_size)`` A-colorings."""
    if table is None:
        table = neighbor_table(g)
    a_colors = np.atleast_2d(a_colors)
    trials = a_colors.shape[0]
    if g.b_size == 0:
        return np.zeros(trials, dtype=np.int64)
    sentinel = np.full((trials, 1), np.iinfo(np.int64).min, dtype=np.int64)
    padded = np.concatenate([a_colors, sentinel], axis=1)
    b_lists = assignment.array[g.a_size:]
    per_trial = table.size * assignment.k
    step = max(1, chunk_cells // max(per_trial, 1))
    counts = np.empty(trials, dtype=np.int64)
    for s in range(0, trials, step):
        nb_colors = padded[s:s + step][:, table]                  # (t, |B|, D)
        hit = (nb_colors[:, :, None, :] == b_lists[None, :, :, None]).any(axis=3)
        counts[s:s + step] = hit.all(axis=2).sum(axis=1)
    return counts
