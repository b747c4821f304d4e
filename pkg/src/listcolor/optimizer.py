"""Maximization of the two-branch coefficient bound.

The bound on the average load of a dense color subset is the smaller of two
expressions in ``(a, y, z)`` (excess overlap, high-overlap fraction, weight).
When ``z - a*y`` exceeds the cut value the first branch already stays below
the target; otherwise the second branch ``h`` is maximized over a box with
that cut.  Both constants are reported in a deterministic certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import CertificateFailed, SingularAtYOne

INV_C = Fraction(800, 503)
QUAD = Fraction(3, 8)          # 0.375
HIGH_BASE = Fraction(477, 800)
HIGH_SLOPE = Fraction(13, 40)
THRESHOLD = Fraction(9, 10)
CUT = 0.66535
TARGET = 0.7969
REPORTED = 0.7964

_INV_C = float(INV_C)
_QUAD = float(QUAD)
_HIGH_BASE = float(HIGH_BASE)
_HIGH_SLOPE = float(HIGH_SLOPE)
_THRESHOLD = float(THRESHOLD)


@dataclass(frozen=True)
class ConstraintBox:
    a_range: tuple[float, float] = (0.0, 0.1)
    y_range: tuple[float, float] = (0.0, 0.9)
    z_range: tuple[float, float] = (0.0, 0.8)
    cut: float = CUT

    def contains(self, a: float, y: float, z: float, tol: float = 1e-12) -> bool:
        return (self.a_range[0] - tol <= a <= self.a_range[1] + tol
                and self.y_range[0] - tol <= y <= self.y_range[1] + tol
                and self.z_range[0] - tol <= z <= self.z_range[1] + tol
                and z - a * y <= self.cut + tol)

    def restore(self, a: float, y: float, z: float) -> tuple[float, float, float]:
        """Closed-form map onto the feasible set: clamp, then lower ``z`` to the cut.

        Identity on feasible points.
        """
        a = min(max(a, self.a_range[0]), self.a_range[1])
        y = min(max(y, self.y_range[0]), self.y_range[1])
        z = min(max(z, self.z_range[0]), self.z_range[1])
        if z - a * y > self.cut:
            z = max(self.z_range[0], self.cut + a * y)
        return a, y, z


def g_linear(a, y, z):
    """``z - (0.9 + a) y``: overlap mass left on the low-overlap neighbors."""
    return z - (_THRESHOLD + a) * y


def h_objective(a, y, z, prefactor: float = _INV_C):
    """Second-branch coefficient; works elementwise on numpy arrays."""
    if np.any(np.asarray(y) == 1):
        raise SingularAtYOne("h is undefined at y = 1")
    g = g_linear(a, y, z)
    return prefactor * g * (1 - _QUAD * g / (1 - y)) + prefactor * y * (_HIGH_BASE + _HIGH_SLOPE * a)


def h_gradient(a: float, y: float, z: float) -> tuple[float, float, float]:
    """Analytic partials ``(dh/da, dh/dy, dh/dz)``."""
    g = g_linear(a, y, z)
    r = g / (1 - y)
    dg = 1 - 2 * _QUAD * r                       # d/dg of g(1 - q g/(1-y))
    dz = _INV_C * dg
    da = _INV_C * (-y * dg + _HIGH_SLOPE * y)
    dy = _INV_C * (-(_THRESHOLD + a) * dg - _QUAD * r * r + _HIGH_BASE + _HIGH_SLOPE * a)
    return da, dy, dz


def branch_one_value(z_minus_ay: float, eps: float = 0.0, prefactor: float = _INV_C) -> float:
    """First-branch coefficient ``(800/503)(1 + 0.75(eps - (z - a y)))``."""
    return prefactor * (1 + 0.75 * (-z_minus_ay + eps))


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    if hi - pts[-1] > 1e-12:
        pts = np.append(pts, hi)
    return pts


def nelder_mead(fun: Callable[[np.ndarray], float], x0, step: float, tol: float = 1e-15,
                max_iter: int = 20000) -> tuple[np.ndarray, float]:
    """Minimize ``fun`` with a reflect/expand/contract/shrink simplex."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0] + [x0 + step * np.eye(n)[i] for i in range(n)]
    values = [fun(x) for x in simplex]
    for _ in range(max_iter):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if values[-1] - values[0] <= tol and max(np.max(np.abs(p - simplex[0])) for p in simplex) < 1e-13:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = fun(xr)
        if fr < values[0]:
            xe = centroid + 2 * (centroid - worst)
            fe = fun(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
        else:
            xc = centroid + 0.5 * (worst - centroid)
        fc = fun(xc)
        if fc < min(fr, values[-1]):
            simplex[-1], values[-1] = xc, fc
            continue
        best = simplex[0]
        simplex = [best] + [best + 0.5 * (p - best) for p in simplex[1:]]
        values = [values[0]] + [fun(p) for p in simplex[1:]]
    i = int(np.argmin(values))
    return simplex[i], values[i]


@dataclass(frozen=True)
class MaximizeResult:
    value: float
    argmax: tuple[float, float, float]
    grid_value: float
    grid_argmax: tuple[float, float, float]
    grid_points: int


def maximize_h(box: ConstraintBox = ConstraintBox(), grid_step: float = 1e-3,
               refine_tol: float = 1e-15, objective=h_objective) -> MaximizeResult:
    """Dense feasible grid scan, then simplex refinement through ``box.restore``."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    a_ax = _axis(*box.a_range, grid_step)
    y_ax = _axis(*box.y_range, grid_step)
    z_ax = _axis(*box.z_range, grid_step)
    yy, zz = np.meshgrid(y_ax, z_ax, indexing="ij")
    best, best_pt, count = -math.inf, None, 0
    for a in a_ax:
        feasible = zz - a * yy <= box.cut
        vals = np.where(feasible, objective(a, yy, zz), -np.inf)
        count += int(feasible.sum())
        i = int(np.argmax(vals))
        if vals.flat[i] > best:
            best = float(vals.flat[i])
            best_pt = (float(a), float(yy.flat[i]), float(zz.flat[i]))
    if best_pt is None:
        raise ValueError("no feasible grid point")

    def neg(x: np.ndarray) -> float:
        return -float(objective(*box.restore(*x)))

    x, fx = np.array(best_pt), -best
    for _ in range(20):
        x_new, f_new = nelder_mead(neg, x, step=grid_step, tol=refine_tol)
        improved = f_new < fx - refine_tol
        if f_new <= fx:
            x, fx = x_new, f_new
        if not improved:
            break
    pt = box.restore(*x)
    value = float(objective(*pt))
    if value < best:
        value, pt = best, best_pt
    return MaximizeResult(value, tuple(float(t) for t in pt), best, best_pt, count)


@dataclass
class Certificate:
    branch_one: float
    branch_two: float
    argmax: tuple[float, float, float]
    grid_value: float
    target: float = TARGET
    reported: float = REPORTED
    margins: dict[str, float] = field(default_factory=dict)
    passed: bool = True

    def to_text(self) -> str:
        a, y, z = self.argmax
        lines = [
            "coefficient certificate",
            f"  target coefficient           {self.target:.4f}",
            f"  branch one at z - a*y = {CUT}: {self.branch_one:.12f}",
            f"  branch two maximum           {self.branch_two:.12f}",
            f"    at a = {a:.12f}, y = {y:.12f}, z = {z:.12f}",
            f"    grid-only maximum          {self.grid_value:.12f}",
            f"  margin branch one            {self.margins['branch_one']:+.3e}",
            f"  margin branch two            {self.margins['branch_two']:+.3e}",
            f"  branch two below {self.reported}     {self.branch_two < self.reported}",
            f"  status                       {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def coefficient_certificate(grid_step: float = 1e-3, prefactor: float = _INV_C,
                            raise_on_fail: bool = True) -> Certificate:
    """Evaluate both branches and check each stays below 0.7969.

    ``prefactor`` replaces ``800/503`` in both branches (for mutation tests).
    """
    def objective(a, y, z):
        return h_objective(a, y, z, prefactor=prefactor)

    res = maximize_h(ConstraintBox(), grid_step, objective=objective)
    b1 = branch_one_value(CUT, 0.0, prefactor=prefactor)
    margins = {"branch_one": TARGET - b1, "branch_two": TARGET - res.value}
    cert = Certificate(b1, res.value, res.argmax, res.grid_value, margins=margins,
                       passed=all(m > 0 for m in margins.values()))
    if raise_on_fail and not cert.passed:
        raise CertificateFailed(cert.to_text())
    return cert
