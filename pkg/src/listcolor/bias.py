"""Per-vertex color-sampling distributions indexed by list position.

Three profiles share one interface:

* ``uniform``: every list color has probability ``1/k``.
* ``linear``: probability ``8/(5k-3) * (1 - 3i/(4k))`` for the color of index ``i``.
* ``piecewise``: probability ``f(i)/(C k)`` with ``f(x) = 1 - 3x/(4k)`` up to
  ``x = 9k/10`` and ``13/40`` afterwards; ``C`` is the mean of ``f`` over
  ``1..k``.

Probabilities depend only on the index, so each profile reduces to a length
``k`` weight vector which is cached.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DeltaTooSmall, IndexOutOfRange, NotDivisibleBy10, WrongPart
from .graph_core import BipartiteGraph
from .list_model import ListAssignment, index_of

KINDS = ("uniform", "linear", "piecewise")

PIECEWISE_A = 0.7969
FLOOR_VALUE = Fraction(13, 40)
LIMIT_C = Fraction(503, 800)


@dataclass(frozen=True)
class BiasProfile:
    """A named sampling distribution plus the parameters of its list-size rule.

    ``p`` is the probability cap in the list-size formula; ``None`` means
    ``1/sqrt(delta)``.
    """

    kind: str
    a: float = 1.0
    p: float | None = None
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"profile kind must be one of {KINDS}, got {self.kind!r}")
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.p is not None and not (0 < self.p < 1):
            raise ValueError("p must lie in (0, 1)")

    @classmethod
    def uniform(cls, a: float = 1.0, p: float | None = None) -> "BiasProfile":
        return cls("uniform", a=a, p=p)

    @classmethod
    def linear(cls, gamma: float = 0.01, p: float | None = None) -> "BiasProfile":
        return cls("linear", a=0.8 + gamma, p=p, gamma=gamma)

    @classmethod
    def piecewise(cls, a: float = PIECEWISE_A, p: float | None = None) -> "BiasProfile":
        return cls("piecewise", a=a, p=p)

    @classmethod
    def from_name(cls, name: str, a: float | None = None, gamma: float | None = None,
                  p: float | None = None) -> "BiasProfile":
        if name == "uniform":
            return cls.uniform(a=1.0 if a is None else a, p=p)
        if name == "linear":
            g = 0.01 if gamma is None else gamma
            return cls("linear", a=0.8 + g if a is None else a, p=p, gamma=g)
        if name == "piecewise":
            return cls.piecewise(a=PIECEWISE_A if a is None else a, p=p)
        raise ValueError(f"unknown profile {name!r}")


def _validity_floor() -> int:
    # least delta on the increasing branch (log delta > 4) with a positive denominator
    d = 55
    while not (math.log(d) > 4 and math.log(d) - 4 * math.log(math.log(d)) > 0):
        d += 1
    return d


VALIDITY_FLOOR = _validity_floor()


def list_size_k(delta: int, profile: BiasProfile) -> int:
    """List size ``ceil(a*delta / ((1-p)(log delta - 4 log log delta)))``.

    The piecewise profile rounds up to a multiple of 10.  Natural logs.  Only
    defined from ``VALIDITY_FLOOR`` (5504) on, where the denominator is
    positive and increasing.
    """
    if delta < VALIDITY_FLOOR:
        raise DeltaTooSmall(f"delta={delta} is below the validity floor {VALIDITY_FLOOR}")
    ld = math.log(delta)
    denom_log = ld - 4 * math.log(ld)
    p = profile.p if profile.p is not None else 1 / math.sqrt(delta)
    raw = profile.a * delta / ((1 - p) * denom_log)
    if profile.kind == "piecewise":
        return 10 * math.ceil(raw / 10)
    return math.ceil(raw)


def f_piecewise_exact(i: int, k: int) -> Fraction:
    if not (1 <= i <= k):
        raise IndexOutOfRange(f"index {i} outside 1..{k}")
    if 10 * i <= 9 * k:
        return 1 - Fraction(3 * i, 4 * k)
    return FLOOR_VALUE


def f_piecewise(i: int, k: int) -> float:
    return float(f_piecewise_exact(i, k))


@lru_cache(maxsize=None)
def mean_f(k: int) -> Fraction:
    """Exact mean of ``f(1..k)`` for any ``k`` (breakpoint ``floor(9k/10)``)."""
    if k < 1:
        raise ValueError("k must be positive")
    m = (9 * k) // 10
    ramp = m - Fraction(3, 4 * k) * Fraction(m * (m + 1), 2)
    return (ramp + (k - m) * FLOOR_VALUE) / k


def normalizer_C(k: int) -> Fraction:
    """Closed form ``503/800 - 27/(80k)`` of the mean of ``f``; needs ``10 | k``."""
    if k < 1 or k % 10:
        raise NotDivisibleBy10(f"k={k} is not a positive multiple of 10")
    return LIMIT_C - Fraction(27, 80 * k)


@lru_cache(maxsize=None)
def index_probabilities_exact(kind: str, k: int) -> tuple[Fraction, ...]:
    if k < 1:
        raise ValueError("k must be positive")
    if kind == "uniform":
        return tuple(Fraction(1, k) for _ in range(k))
    if kind == "linear":
        pre = Fraction(8, 5 * k - 3)
        return tuple(pre * (1 - Fraction(3 * i, 4 * k)) for i in range(1, k + 1))
    if kind == "piecewise":
        ck = mean_f(k) * k
        return tuple(f_piecewise_exact(i, k) / ck for i in range(1, k + 1))
    raise ValueError(f"unknown profile kind {kind!r}")


@lru_cache(maxsize=None)
def _weights(kind: str, k: int) -> np.ndarray:
    w = np.array([float(x) for x in index_probabilities_exact(kind, k)])
    w.flags.writeable = False
    return w


@lru_cache(maxsize=None)
def _cdf(kind: str, k: int) -> np.ndarray:
    c = np.cumsum(_weights(kind, k))
    c[-1] = 1.0
    c.flags.writeable = False
    return c


def index_probabilities(profile: BiasProfile, k: int) -> np.ndarray:
    """Probability of drawing the color at index ``1..k`` (float vector)."""
    return _weights(profile.kind, k)


def index_cdf(profile: BiasProfile, k: int) -> np.ndarray:
    return _cdf(profile.kind, k)


def max_prob_bound(profile: BiasProfile, k: int) -> float:
    """Analytic cap on any single color probability."""
    if profile.kind == "uniform":
        return 1 / k
    if profile.kind == "linear":
        return 8 / (5 * k - 3) if k > 1 else 1.0
    return float(1 / (mean_f(k) * k))


def prob(profile: BiasProfile, assignment: ListAssignment, v: int, c: int) -> float:
    """``P_v(c)``; zero for colors outside ``L(v)``."""
    i = index_of(assignment, v, c)
    if i is None:
        return 0.0
    return float(_weights(profile.kind, assignment.k)[i - 1])


def rho(profile: BiasProfile, assignment: ListAssignment, g: BipartiteGraph, w: int, c: int) -> float:
    """Total probability that a neighbor of ``w`` draws ``c``."""
    if not g.in_b(w):
        raise WrongPart(f"vertex {w} is not in part B")
    weights = _weights(profile.kind, assignment.k)
    total = 0.0
    for v in g.neighbors(w):
        i = index_of(assignment, v, c)
        if i is not None:
            total += weights[i - 1]
    return float(total)


def rho_vector(profile: BiasProfile, assignment: ListAssignment, g: BipartiteGraph, w: int) -> list[float]:
    """``rho_w(c)`` for every ``c`` in ``L(w)``, in index order."""
    return [rho(profile, assignment, g, w, c) for c in assignment.lists[w]]


def tail_average_rho(profile: BiasProfile, assignment: ListAssignment, g: BipartiteGraph,
                     w: int, eps: float = 0.05) -> float:
    """Mean of ``rho_w`` over the ``ceil(eps*k)`` colors of largest index in ``L(w)``."""
    if not (0 < eps <= 1):
        raise ValueError("eps must lie in (0, 1]")
    k = assignment.k
    m = max(1, math.ceil(eps * k - 1e-12))
    tail = assignment.lists[w][k - m:]
    return sum(rho(profile, assignment, g, w, c) for c in tail) / m


PROB_COLUMNS = ("c", "index", "prob")


def prob_csv(profile: BiasProfile, assignment: ListAssignment, v: int) -> str:
    """CSV ``c,index,prob`` for one vertex."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROB_COLUMNS)
    weights = _weights(profile.kind, assignment.k)
    for i, c in enumerate(assignment.lists[v], start=1):
        writer.writerow([c, i, repr(float(weights[i - 1]))])
    return buf.getvalue()
