import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from listcolor.bias import BiasProfile
from listcolor.coupon_lab import (
    CouponInstance,
    analytic_bound,
    cap_holds,
    collection_frequency,
    color_load,
    exact_collection_prob,
    is_collected,
    lemma_premise_check,
    per_color_prob,
    product_bound,
    random_instance,
    sample_draws,
    simulate_draws,
)
from listcolor.errors import CapViolated, EmptySubset, TooLargeToEnumerate


def uniform12(p_cap=None):
    return CouponInstance((1, 2), ((1, 2), (1, 2)), ((0.5, 0.5), (0.5, 0.5)), p_cap)


def inclusion_exclusion(inst):
    """P(all target colors drawn) = sum_S (-1)^|S| prod_i (1 - P_i(S))."""
    total = 0.0
    t = list(inst.target)
    for r in range(len(t) + 1):
        for s in itertools.combinations(t, r):
            prod = 1.0
            for i in range(inst.delta):
                prod *= 1 - sum(inst.source_prob(i, c) for c in s)
            total += (-1) ** r * prod
    return total


def test_point_mass_draws():
    inst = CouponInstance((), ((4, 5), (6,)), ((0.0, 1.0), (1.0,)))
    for seed in range(5):
        assert sample_draws(inst, seed) == (5, 6)


def test_draws_seeded():
    inst = random_instance(6, 3, 8, BiasProfile.linear(), seed=1)
    assert sample_draws(inst, 42) == sample_draws(inst, 42)


def test_uniform_frequency():
    inst = CouponInstance((), ((1, 2),), ((0.5, 0.5),))
    d = simulate_draws(inst, 100_000, 3)[:, 0]
    freq = (d == 1).mean()
    assert abs(freq - 0.5) <= 3 * math.sqrt(0.25 / 100_000)


def test_is_collected():
    assert is_collected((), (1,))
    assert is_collected((1, 2), (1, 2))
    assert not is_collected((1, 2), (1, 1))
    assert not is_collected((1, 2, 3), (1, 2))


def test_exact_known_values():
    assert exact_collection_prob(uniform12()) == pytest.approx(0.5)
    inst = CouponInstance((1, 2), ((1, 3), (2, 3)), ((1.0, 0.0), (1.0, 0.0)))
    assert exact_collection_prob(inst) == 1.0
    inst = CouponInstance((1, 2, 3), ((1, 2), (2, 3)), ((0.5, 0.5), (0.5, 0.5)))
    assert exact_collection_prob(inst) == 0.0
    with pytest.raises(TooLargeToEnumerate):
        exact_collection_prob(CouponInstance((1,), tuple(((1, 2, 3, 4),) * 12), tuple(((0.25,) * 4,) * 12)))


def test_per_color_prob():
    assert per_color_prob(uniform12(), 7) == 0.0
    assert per_color_prob(uniform12(), 1) == pytest.approx(0.75)


def test_per_color_prob_large_delta_underflow():
    srcs = tuple((1, 2) for _ in range(5000))
    inst = CouponInstance((1,), srcs, tuple((0.5, 0.5) for _ in srcs))
    assert per_color_prob(inst, 1) == 1.0


def test_per_color_prob_matches_simulation():
    inst = random_instance(5, 3, 5, BiasProfile.piecewise(), seed=9)
    d = simulate_draws(inst, 100_000, 4)
    for c in inst.target:
        q = per_color_prob(inst, c)
        freq = (d == c).any(axis=1).mean()
        assert abs(freq - q) <= 3 * math.sqrt(q * (1 - q) / 100_000) + 1e-12


def test_analytic_bound_values():
    zero = CouponInstance((1, 2, 3), ((4, 5),), ((0.5, 0.5),), p_cap=0.6)
    assert analytic_bound(zero) == pytest.approx(math.exp(-3))
    inst = uniform12(0.6)
    expected = math.exp(-2 * math.exp(-1 / 0.4))
    assert analytic_bound(inst) == pytest.approx(expected)
    assert analytic_bound(inst) >= exact_collection_prob(inst)
    with pytest.raises(CapViolated):
        analytic_bound(uniform12(0.5))
    with pytest.raises(CapViolated):
        analytic_bound(CouponInstance((1,), ((1,),), ((1.0,),)))


def test_analytic_bound_monotone_in_load():
    lo = CouponInstance((1, 2), ((1, 3), (2, 3)), ((0.2, 0.8), (0.5, 0.5)), p_cap=0.9)
    hi = CouponInstance((1, 2), ((1, 3), (2, 3)), ((0.4, 0.6), (0.5, 0.5)), p_cap=0.9)
    assert analytic_bound(lo) < analytic_bound(hi)


def test_product_bound_values():
    assert product_bound(uniform12()) == pytest.approx(9 / 16)
    assert product_bound(uniform12()) >= exact_collection_prob(uniform12())
    one = CouponInstance((2,), ((1, 2), (2, 3)), ((0.3, 0.7), (0.6, 0.4)))
    assert product_bound(one) == per_color_prob(one, 2)


def test_empty_target_all_one():
    inst = CouponInstance((), ((1, 2),), ((0.5, 0.5),), p_cap=0.6)
    assert exact_collection_prob(inst) == product_bound(inst) == analytic_bound(inst) == 1.0


def test_exact_matches_inclusion_exclusion():
    for seed in range(60):
        rng = np.random.default_rng(seed)
        inst = random_instance(int(rng.integers(1, 5)), int(rng.integers(1, 4)), 6,
                               BiasProfile.from_name(["uniform", "linear", "piecewise"][seed % 3]), seed)
        assert exact_collection_prob(inst) == pytest.approx(inclusion_exclusion(inst), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_sandwich_property(delta, k, extra, seed):
    inst = random_instance(delta, k, k + extra, BiasProfile.from_name(["uniform", "linear", "piecewise"][seed % 3]), seed)
    exact = exact_collection_prob(inst)
    pb = product_bound(inst)
    assert exact <= pb + 1e-12
    if cap_holds(inst):
        assert pb <= analytic_bound(inst) + 1e-12


def test_lemma_premise():
    zero = CouponInstance((1, 2), ((5, 6),), ((0.5, 0.5),))
    assert lemma_premise_check(zero, (1,), 0.5, 1, 2)
    inst = uniform12()
    # rho(1) = rho(2) = 1 equals a*delta/k with a=1, delta=2, k=2
    assert lemma_premise_check(inst, (1, 2), 1.0, 2, 2)
    assert not lemma_premise_check(inst, (1, 2), 0.99, 2, 2)
    with pytest.raises(EmptySubset):
        lemma_premise_check(inst, (), 1.0, 2, 2)


def test_lemma_premise_random():
    inst = random_instance(5, 4, 7, BiasProfile.linear(), seed=3)
    sub = inst.target[:2]
    mean = sum(color_load(inst, c) for c in sub) / 2
    for a in (0.3, 0.8, 1.0):
        assert lemma_premise_check(inst, sub, a, 5, 4) == (mean <= a * 5 / 4)


def test_instance_validation():
    with pytest.raises(ValueError):
        CouponInstance((1,), ((1, 2),), ((0.5, 0.6),))
    with pytest.raises(ValueError):
        CouponInstance((1,), ((1, 1),), ((0.5, 0.5),))


def test_collection_frequency_close():
    inst = random_instance(4, 2, 3, BiasProfile.uniform(), seed=2)
    q = exact_collection_prob(inst)
    f = collection_frequency(inst, 20_000, 1)
    assert abs(f - q) <= 4 * math.sqrt(q * (1 - q) / 20_000) + 1e-12
