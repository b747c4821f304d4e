import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from listcolor.errors import CertificateFailed, SingularAtYOne
from listcolor.optimizer import (
    CUT,
    ConstraintBox,
    branch_one_value,
    coefficient_certificate,
    g_linear,
    h_gradient,
    h_objective,
    maximize_h,
    nelder_mead,
)


@pytest.fixture(scope="module")
def full_max():
    return maximize_h()


def test_frozen_values():
    assert h_objective(0, 0, CUT) == pytest.approx(0.794180543240557, abs=1e-12)
    assert branch_one_value(CUT) == pytest.approx(0.796799204771372, abs=1e-12)
    assert g_linear(0.1, 0.202934, 0.685643) == pytest.approx(0.482709, abs=1e-12)


def test_h_rejects_y_one():
    with pytest.raises(SingularAtYOne):
        h_objective(0.0, 1.0, 0.5)


def test_degenerate_box():
    box = ConstraintBox((0, 0), (0, 0), (0, 0))
    res = maximize_h(box, grid_step=0.1)
    assert res.value == 0.0
    assert res.argmax == (0.0, 0.0, 0.0)


def test_tighter_cut_lowers_max(full_max):
    res = maximize_h(ConstraintBox(cut=0.4), grid_step=5e-3)
    assert res.value < 0.796309
    assert res.value < full_max.value


def test_argmax_feasible_and_refinement(full_max):
    assert ConstraintBox().contains(*full_max.argmax)
    assert full_max.grid_value <= full_max.value <= full_max.grid_value + 1e-3
    assert full_max.value == pytest.approx(0.7963092370861302, abs=1e-9)


def test_restore_is_identity_on_feasible():
    box = ConstraintBox()
    assert box.restore(0.05, 0.3, 0.6) == (0.05, 0.3, 0.6)
    a, y, z = box.restore(0.5, -1.0, 2.0)
    assert box.contains(a, y, z)


def _h_from_invariants(g, y, ay):
    return (800 / 503) * (g * (1 - 0.375 * g / (1 - y)) + y * 477 / 800 + ay * 13 / 40)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.1), st.floats(0, 0.9), st.floats(0, 0.8))
def test_h_is_function_of_g_y_ay(a, y, z):
    want = _h_from_invariants(g_linear(a, y, z), y, a * y)
    assert h_objective(a, y, z) == pytest.approx(want, abs=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    step = 1e-6
    for a, y, z in zip(rng.uniform(0, 0.1, 100), rng.uniform(0, 0.9, 100), rng.uniform(0, 0.8, 100)):
        grad = h_gradient(a, y, z)
        fd = [
            (h_objective(a + step, y, z) - h_objective(a - step, y, z)) / (2 * step),
            (h_objective(a, y + step, z) - h_objective(a, y - step, z)) / (2 * step),
            (h_objective(a, y, z + step) - h_objective(a, y, z - step)) / (2 * step),
        ]
        for got, want in zip(grad, fd):
            assert abs(got - want) < 1e-6


def test_branch_one_monotone():
    xs = np.linspace(0, 0.8, 50)
    vals = [branch_one_value(x) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert branch_one_value(0.3, eps=0.1) > branch_one_value(0.3)
    assert 0.7967 < branch_one_value(CUT) < 0.7969


def test_nelder_mead_quadratic():
    x, fx = nelder_mead(lambda v: float(((v - np.array([1.0, -2.0])) ** 2).sum()), [0, 0], 0.5)
    assert np.allclose(x, [1, -2], atol=1e-6)
    assert fx < 1e-12


def test_certificate_deterministic():
    c1 = coefficient_certificate(grid_step=5e-3)
    c2 = coefficient_certificate(grid_step=5e-3)
    assert c1.to_text() == c2.to_text()
    assert c1.to_json() == c2.to_json()
    assert c1.passed
    assert "PASS" in c1.to_text()


def test_certificate_catches_wrong_prefactor():
    with pytest.raises(CertificateFailed):
        coefficient_certificate(grid_step=1e-2, prefactor=810 / 503)
    cert = coefficient_certificate(grid_step=1e-2, prefactor=810 / 503, raise_on_fail=False)
    assert not cert.passed
    assert cert.margins["branch_one"] < 0


def test_bad_grid_step():
    with pytest.raises(ValueError):
        maximize_h(grid_step=0)


def test_h_vectorized():
    ys = np.array([0.1, 0.2])
    out = h_objective(0.05, ys, 0.5)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(h_objective(0.05, 0.2, 0.5))
    assert math.isfinite(float(out[0]))
