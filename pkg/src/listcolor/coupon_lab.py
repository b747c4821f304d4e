"""Coupon collection with independent, non-identical color draws.

Source ``i`` draws one color from its list ``L_i`` with distribution ``P_i``.
The target ``L'`` is collected when every target color is drawn by some
source.  This module computes the collection probability exactly (small
instances), by simulation, and through the per-color product and the
exponential bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bias import BiasProfile, index_probabilities
from .errors import CapViolated, EmptySubset, TooLargeToEnumerate
from .seeding import make_rng

ENUMERATION_CAP = 10**7
UNDERFLOW = 1e-300


@dataclass(frozen=True)
class CouponInstance:
    target: tuple[int, ...]
    sources: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[float, ...], ...]
    p_cap: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "target", tuple(int(c) for c in self.target))
        object.__setattr__(self, "sources", tuple(tuple(int(c) for c in s) for s in self.sources))
        object.__setattr__(self, "probs", tuple(tuple(float(x) for x in p) for p in self.probs))
        if len(self.sources) != len(self.probs):
            raise ValueError("one distribution per source required")
        for i, (src, p) in enumerate(zip(self.sources, self.probs)):
            if len(src) != len(p):
                raise ValueError(f"source {i}: list and distribution lengths differ")
            if len(set(src)) != len(src):
                raise ValueError(f"source {i}: repeated color")
            if any(x < 0 for x in p) or abs(math.fsum(p) - 1.0) > 1e-12:
                raise ValueError(f"source {i}: not a probability distribution")

    @property
    def delta(self) -> int:
        return len(self.sources)

    @property
    def cap(self) -> float:
        """``p_cap`` if given, else the largest probability plus ``1e-12``."""
        if self.p_cap is not None:
            return self.p_cap
        return max((max(p) for p in self.probs if p), default=0.0) + 1e-12

    def source_prob(self, i: int, c: int) -> float:
        try:
            return self.probs[i][self.sources[i].index(c)]
        except ValueError:
            return 0.0


def instance_from_profile(target: Sequence[int], sources: Sequence[Sequence[int]],
                          profile: BiasProfile, p_cap: float | None = None) -> CouponInstance:
    """Sources sorted increasingly and weighted by the profile's index rule."""
    srcs = tuple(tuple(sorted(s)) for s in sources)
    probs = tuple(tuple(index_probabilities(profile, len(s)).tolist()) for s in srcs)
    return CouponInstance(tuple(target), srcs, probs, p_cap)


def random_instance(delta: int, k: int, pool: int, profile: BiasProfile,
                    seed: int | None, p_cap: float | None = None) -> CouponInstance:
    """Target and ``delta`` sources as uniform ``k``-subsets of ``{1..pool}``."""
    rng = make_rng(seed)
    def pick():
        return tuple(sorted(int(c) + 1 for c in rng.choice(pool, size=k, replace=False)))
    target = pick()
    sources = [pick() for _ in range(delta)]
    return instance_from_profile(target, sources, profile, p_cap)


def sample_draws(inst: CouponInstance, seed: int | np.random.Generator | None) -> tuple[int, ...]:
    """One independent draw per source."""
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    out = []
    for src, p in zip(inst.sources, inst.probs):
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        i = int(np.searchsorted(cdf, rng.random(), side="right"))
        out.append(src[min(i, len(src) - 1)])
    return tuple(out)


def simulate_draws(inst: CouponInstance, trials: int, seed: int | None) -> np.ndarray:
    """``(trials, delta)`` array of independent draws."""
    rng = make_rng(seed)
    out = np.empty((trials, inst.delta), dtype=np.int64)
    for j, (src, p) in enumerate(zip(inst.sources, inst.probs)):
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        idx = np.minimum(np.searchsorted(cdf, rng.random(trials), side="right"), len(src) - 1)
        out[:, j] = np.asarray(src, dtype=np.int64)[idx]
    return out


def is_collected(target: Sequence[int], draws: Sequence[int]) -> bool:
    return set(target) <= set(draws)


def collection_frequency(inst: CouponInstance, trials: int, seed: int | None) -> float:
    """Fraction of simulated trials in which the whole target is collected."""
    if not inst.target:
        return 1.0
    draws = simulate_draws(inst, trials, seed)
    hit = np.ones(trials, dtype=bool)
    for c in inst.target:
        hit &= (draws == c).any(axis=1)
    return float(hit.mean())


def exact_collection_prob(inst: CouponInstance) -> float:
    """Exact collection probability by enumerating every outcome tuple."""
    size = math.prod(len(s) for s in inst.sources)
    if size > ENUMERATION_CAP:
        raise TooLargeToEnumerate(f"{size} outcome tuples exceed cap {ENUMERATION_CAP}")
    target = set(inst.target)
    if not target:
        return 1.0
    if len(target) > inst.delta:
        return 0.0
    total = 0.0
    choices = [list(zip(s, p)) for s, p in zip(inst.sources, inst.probs)]
    for outcome in itertools.product(*choices):
        if target <= {c for c, _ in outcome}:
            total += math.prod(q for _, q in outcome)
    return total


def per_color_prob(inst: CouponInstance, c: int) -> float:
    """``1 - prod_i (1 - P_i(c))`` accumulated in log space."""
    log_miss = 0.0
    for i in range(inst.delta):
        q = inst.source_prob(i, c)
        if q >= 1.0:
            return 1.0
        log_miss += math.log1p(-q)
    miss = math.exp(log_miss)
    if miss < UNDERFLOW:
        miss = 0.0
    return 1.0 - miss


def color_load(inst: CouponInstance, c: int) -> float:
    """``rho(c)``: sum over sources of the probability of drawing ``c``."""
    return math.fsum(inst.source_prob(i, c) for i in range(inst.delta))


def product_bound(inst: CouponInstance) -> float:
    return math.prod(per_color_prob(inst, c) for c in inst.target)


def cap_holds(inst: CouponInstance) -> bool:
    p = inst.cap
    return 0 < p < 1 and all(q < p for dist in inst.probs for q in dist)


def analytic_bound(inst: CouponInstance) -> float:
    """``exp(-sum_c exp(-rho(c)/(1-p)))`` over the target colors."""
    p = inst.cap
    if not (0 < p < 1):
        raise CapViolated(f"p_cap={p} must lie in (0, 1)")
    if not cap_holds(inst):
        raise CapViolated(f"some source probability reaches p_cap={p}")
    s = math.fsum(math.exp(-color_load(inst, c) / (1 - p)) for c in inst.target)
    return math.exp(-s)


def lemma_premise_check(inst: CouponInstance, subset: Sequence[int], a: float,
                        delta: int, k: int) -> bool:
    """Whether the mean of ``rho`` over ``subset`` is at most ``a*delta/k``."""
    if len(subset) == 0:
        raise EmptySubset("subset must contain at least one color")
    if not set(subset) <= set(inst.target):
        raise ValueError("subset must be contained in the target")
    mean = math.fsum(color_load(inst, c) for c in subset) / len(subset)
    limit = a * delta / k
    return mean <= limit * (1 + 1e-12)


def coupon_row(inst: CouponInstance, trials: int, seed: int | None) -> dict[str, object]:
    """One CSV row ``trial_count,empirical,exact_or_na,product_bound,analytic_bound``."""
    try:
        exact: object = exact_collection_prob(inst)
    except TooLargeToEnumerate:
        exact = "na"
    try:
        ab: object = analytic_bound(inst)
    except CapViolated:
        ab = "na"
    return {
        "trial_count": trials,
        "empirical": collection_frequency(inst, trials, seed),
        "exact_or_na": exact,
        "product_bound": product_bound(inst),
        "analytic_bound": ab,
    }


COUPON_COLUMNS = ("trial_count", "empirical", "exact_or_na", "product_bound", "analytic_bound")
