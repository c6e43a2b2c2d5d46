"""Balls in any dimension: closed-form torsion and shooting eigenvalues.

All functions accept ``beta = INF`` for the Dirichlet problem. ``INF`` is the
IEEE infinity, and every formula branches on it explicitly instead of
evaluating ``1/beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy.optimize import brentq

from . import _radial_kernels as _rk

INF = math.inf


class BracketError(RuntimeError):
    """The boundary functional does not change sign over the search bracket."""

    def __init__(self, message, scanned):
        super().__init__(f"{message}; scanned (mu, g): {scanned}")
        self.scanned = scanned


def is_dirichlet(beta) -> bool:
    return beta == INF


def _check_beta(beta):
    if not (is_dirichlet(beta) or beta > 0):
        raise ValueError(f"beta must be positive or INF, got {beta}")


@dataclass(frozen=True)
class BallQuantity:
    radius: float
    dim: int
    beta: float
    value: float
    kind: str  # "eigenvalue" | "torsion"


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in R^d, by the two-step recurrence."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    w = 2.0 if d % 2 else 1.0  # omega_1 = 2, omega_0 = 1
    for j in range(2 if d % 2 == 0 else 3, d + 1, 2):
        w *= 2.0 * math.pi / j
    return w


def sphere_area(d: int) -> float:
    """(d-1)-measure of the unit sphere in R^d, ``d * omega_d``."""
    return d * unit_ball_volume(d)


def torsion_ball(r: float, beta: float, d: int) -> float:
    _check_beta(beta)
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    w = unit_ball_volume(d)
    if is_dirichlet(beta):
        return w * r ** (d + 2) / (d * (d + 2))
    return (w / d) * (r ** (d + 1) / beta + r ** (d + 2) / (d + 2))


def torsion_ball_profile(r: float, beta: float, d: int, s):
    """Torsion function of ``B_r`` at distance ``s`` from the centre."""
    _check_beta(beta)
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > r)):
        raise ValueError("profile is defined for 0 <= s <= r")
    out = (r * r - s * s) / (2 * d)
    if not is_dirichlet(beta):
        out = out + r / (d * beta)
    return out if out.ndim else float(out)


def eig_ball_lower_bound(r: float, beta: float) -> float:
    return beta / (4 * r * (1 + beta * r))


# --------------------------------------------------------------------------
# shooting


def _section_root(g_of, lo, hi, g_lo, g_hi, width):
    """Shrink [lo, hi] around the sign change of ``g_of`` until ``hi - lo <= width``.

    ``g_lo > 0 > g_hi`` on entry. Each round evaluates ``SECTIONS`` interior
    points in one kernel call.
    """
    k = _rk.SECTIONS
    for _ in range(4000):
        if hi - lo <= width or hi - lo <= 4e-16 * abs(hi):
            break
        pts = lo + (hi - lo) * np.arange(1, k + 1) / (k + 1)
        g = g_of(pts)
        neg = np.flatnonzero(g <= 0.0)
        if neg.size == 0:
            lo = pts[-1]
        else:
            j = neg[0]
            hi = pts[j]
            if j > 0:
                lo = pts[j - 1]
    return lo, hi


def _dirichlet_scan(d, nsteps):
    """Unit-grid scan for the first sign change of ``u(1; mu)``."""
    grid = np.arange(0.0, 4.0 * d * d + 41.0, 1.0)
    vals = _rk.boundary_functional(grid, 0.0, d, nsteps, True)
    neg = np.flatnonzero(vals < 0.0)
    if neg.size == 0:
        raise BracketError("u(1) keeps its sign over the scan", list(zip(grid[:8], vals[:8])))
    j = neg[0]
    return grid[j - 1], grid[j], vals[j - 1], vals[j]


def _dirichlet_root(d, nsteps, width):
    lo, hi, g_lo, g_hi = _dirichlet_scan(d, nsteps)

    def g_of(m):
        return _rk.boundary_functional(np.asarray(m, float), 0.0, d, nsteps, True)

    return _section_root(g_of, lo, hi, g_lo, g_hi, width)


def _robin_root(bt, d, nsteps, width):
    # any mu past the first Dirichlet zero lies below the second radial Robin
    # eigenvalue, so [lo, hi] isolates the principal one
    _, past_dirichlet, _, _ = _dirichlet_scan(d, nsteps)
    lo = bt / (4.0 * (1.0 + bt))
    hi = min(past_dirichlet, d * bt)

    def g_of(m):
        return _rk.boundary_functional(np.asarray(m, float), bt, d, nsteps, False)

    g_lo, g_hi = g_of(np.array([lo, hi]))
    if not (g_lo > 0.0 and g_hi < 0.0):
        raise BracketError("Robin boundary functional has no sign change", [(lo, g_lo), (hi, g_hi)])
    return _section_root(g_of, lo, hi, g_lo, g_hi, width)


SERIES_BETA = 1e-3


def _small_robin_root(bt, d):
    """Unit-ball Robin eigenvalue for ``bt <= SERIES_BETA`` from the power series.

    With ``u(s) = sum (-mu)^k s^(2k) / c_k`` and ``mu = bt*x`` the boundary
    condition divided by ``bt`` is ``h(x) = sum (-1)^k bt^(k-1) x^k (2k+bt)/c_k``,
    an O(1) function with a simple root near ``x = d``. Shooting cannot resolve
    the root here because ``g`` changes by only O(bt^2) across the bracket.
    """

    def h(x):
        total, term_c, power = 1.0, 1.0, 1.0 / bt
        for k in range(1, 40):
            term_c *= 2.0 * k * (2.0 * k + d - 2.0)
            power *= -bt * x
            piece = power * (2.0 * k + bt) / term_c
            total += piece
            if abs(piece) < 1e-18 * abs(total):
                break
        return total

    x = brentq(h, 0.5 * d, 2.0 * d, xtol=1e-15, rtol=1e-15)
    return bt * x


def _unit_eigenvalue(bt, d, width, nsteps):
    if not is_dirichlet(bt) and bt <= SERIES_BETA:
        return _small_robin_root(bt, d)
    if is_dirichlet(bt):
        lo, hi = _dirichlet_root(d, nsteps, width)
    else:
        lo, hi = _robin_root(bt, d, nsteps, width)
    return 0.5 * (lo + hi)


def eig_ball(r: float, beta: float, d: int, tol: float = 1e-10) -> float:
    """Principal eigenvalue of ``B_r`` in ``R^d`` by radial shooting.

    The problem is solved on the unit ball with Robin parameter ``beta*r`` and
    rescaled by ``r**-2``. The RK4 step count doubles until two successive
    results agree to ``tol`` (absolute, in units of the returned eigenvalue) or
    to a relative 1e-13, whichever is looser.
    """
    _check_beta(beta)
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    bt = INF if is_dirichlet(beta) else beta * r
    width = 0.25 * tol * r * r
    nsteps = 256
    prev = _unit_eigenvalue(bt, d, width, nsteps)
    while True:
        nsteps *= 2
        cur = _unit_eigenvalue(bt, d, width, nsteps)
        if abs(cur - prev) <= 0.5 * tol * r * r or abs(cur - prev) <= 1e-13 * abs(cur):
            return cur / (r * r)
        if nsteps >= 1 << 16:
            raise RuntimeError(f"shooting did not stabilise under step halving (last change {cur - prev:.3e})")
        prev = cur


def estimate_Cd(d: int, grid: Iterable[Tuple[float, float]], tol: float = 1e-10) -> float:
    """Largest ``lambda_beta(B_r) r (1 + beta r) / beta`` over the (r, beta) grid."""
    pts = list(grid)
    if not pts:
        raise ValueError("grid must not be empty")
    return max(eig_ball(r, b, d, tol) * r * (1 + b * r) / b for r, b in pts)


def ball_quantity(kind: str, r: float, beta: float, d: int) -> BallQuantity:
    if kind == "eigenvalue":
        value = eig_ball(r, beta, d)
    elif kind == "torsion":
        value = torsion_ball(r, beta, d)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return BallQuantity(radius=r, dim=d, beta=beta, value=value, kind=kind)


def unit_measure_radius(d: int) -> float:
    return unit_ball_volume(d) ** (-1.0 / d)
