"""Shell-theorem evaluation of the lattice energy ``E_N = <G*(mu_N - mu), mu_N - mu>``.

Kernel ``G(x) = 1/(4 pi |x|)``. A uniform shell acts as a point mass outside
itself and has constant potential ``m/(4 pi r)`` inside, so every term except
the two involving the cube reduces to closed form. The cube potential
``Phi(x) = int_Q |x-y|^-1 dy`` is split at ``x`` into eight boxes; each box is
cut into three pyramids with apex ``x``, whose radial variable integrates
exactly, leaving smooth face integrals that are estimated by stratified
antithetic Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from . import _kernels
from .lattice import EnergyBreakdown, QuadraticPoly, ShellLattice

FOUR_PI = 4.0 * math.pi
MAX_PAIR_N = 16
DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int
    seed: int


def shell_pair_energy(D: float, m: float) -> float:
    """Mutual energy of two disjoint shells of mass ``m`` at distance ``D``."""
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    return m * m / (FOUR_PI * D)


def shell_self_energy(m: float, r: float) -> float:
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return m * m / (FOUR_PI * r)


def _strata(samples: int) -> int:
    # four integrand evaluations per stratum (two antithetic pairs)
    if samples < 16:
        raise ValueError(f"need at least 16 samples, got {samples}")
    return max(2, math.isqrt(samples // 4))


def _draws(samples: int, seed: int) -> np.ndarray:
    m = _strata(samples)
    return np.random.default_rng(seed).random((m, m, 2, 2))


def _faces(centers: np.ndarray):
    """Face integrals needed for ``sum_x Phi(x)``, merged by identical parameters.

    Returns ``(a, b, c, w)``: ``Phi`` summed over centres equals
    ``sum_f w_f * mean_{[0,1]^2} 1/sqrt(a^2 + (b s)^2 + (c t)^2)``.
    """
    lo = centers
    hi = 1.0 - centers
    rows = []
    for sx in (lo[:, 0], hi[:, 0]):
        for sy in (lo[:, 1], hi[:, 1]):
            for sz in (lo[:, 2], hi[:, 2]):
                vol_half = 0.5 * sx * sy * sz
                for a, b, c in ((sx, sy, sz), (sy, sx, sz), (sz, sx, sy)):
                    rows.append(np.stack([a, np.minimum(b, c), np.maximum(b, c), vol_half], axis=1))
    table = np.concatenate(rows)
    keys, inverse = np.unique(table[:, :3], axis=0, return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=table[:, 3], minlength=len(keys))
    return (
        np.ascontiguousarray(keys[:, 0]),
        np.ascontiguousarray(keys[:, 1]),
        np.ascontiguousarray(keys[:, 2]),
        weights,
    )


def _stratified(pairs: np.ndarray) -> Tuple[float, float]:
    m = pairs.shape[0]
    est = float(pairs.mean())
    var = float(np.sum((pairs[..., 0] - pairs[..., 1]) ** 2)) / 4.0 / m**4
    return est, math.sqrt(var)


def cube_potential_sum(centers, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> MCEstimate:
    """Monte-Carlo estimate of ``sum_x int_Q |x-y|^-1 dy`` over the given points."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if np.any(centers <= 0.0) or np.any(centers >= 1.0):
        raise ValueError("points must lie strictly inside the unit cube")
    a, b, c, w = _faces(centers)
    est, se = _stratified(_kernels.face_pairs(a, b, c, w, _draws(samples, seed)))
    return MCEstimate(est, se, samples, seed)


def shell_cube_energy(center, r: float, m: float, c: float, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> MCEstimate:
    """Mutual energy of one shell with the uniform density ``c`` on ``[0,1]^3``.

    ``c m/(4 pi) * (I_out + |B_r|/r)`` with ``I_out = Phi(center) - 2 pi r^2``.
    """
    center = np.asarray(center, dtype=np.float64)
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if np.any(center - r <= 0.0) or np.any(center + r >= 1.0):
        raise ValueError("the shell must lie inside the unit cube")
    phi = cube_potential_sum(center[None, :], samples, seed)
    pref = c * m / FOUR_PI
    inside = (4.0 / 3.0) * math.pi * r**2  # |B_r| / r
    return MCEstimate(pref * (phi.value - 2.0 * math.pi * r**2 + inside), pref * phi.stderr, samples, seed)


@lru_cache(maxsize=32)
def _cube_self_integral(samples: int, seed: int) -> Tuple[float, float]:
    # int_Q int_Q |x-y|^-1 = 8 int_[0,1]^3 prod(1-z_i)/|z| dz; the three pyramids
    # {z_i = max} are congruent and the radial variable integrates to P(v,w)
    est, se = _stratified(_kernels.cube_pairs(_draws(samples, seed)))
    return 24.0 * est, 24.0 * se


def cube_self_energy(c: float, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> MCEstimate:
    """Energy of the uniform density ``c`` on the unit cube; cached per ``(samples, seed)``."""
    k, se = _cube_self_integral(int(samples), int(seed))
    pref = c * c / FOUR_PI
    return MCEstimate(pref * k, pref * se, samples, seed)


def cross_sum(N: int) -> float:
    """``sum_{l != p} 1/|x_l - x_p|`` over the ``N^3`` cell centres."""
    if N > MAX_PAIR_N:
        raise ValueError(f"pairwise sums are capped at N <= {MAX_PAIR_N}, got {N}")
    return 2.0 * N * _kernels.inverse_distance_sum(N)


def h1_energy(lat: ShellLattice, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> EnergyBreakdown:
    N, r, m, c = lat.N, lat.r, lat.shell_mass, lat.density
    s_self = N**3 * shell_self_energy(m, r)
    s_cross = m * m / FOUR_PI * cross_sum(N)
    phi = cube_potential_sum(lat.centers, samples, seed)
    pref = c * m / FOUR_PI
    s_nmu = pref * (phi.value - N**3 * (2.0 / 3.0) * math.pi * r**2)
    mumu = cube_self_energy(c, samples, seed)
    # the two Monte-Carlo terms share random numbers; add their errors linearly
    stderr = 2.0 * pref * phi.stderr + mumu.stderr
    return EnergyBreakdown(
        N=N,
        k=lat.k,
        r_N=r,
        S_NN_self=s_self,
        S_NN_cross=s_cross,
        S_Nmu=s_nmu,
        S_mumu=mumu.value,
        mc_stderr=stderr,
        seed=seed,
    )


def self_energy_closed_form(N: int, k: float) -> float:
    """``N^3 m^2/(4 pi r_N) = (4 pi)^2 k^3 N^(-3/2) / (4 pi)``."""
    return FOUR_PI**2 * k**3 * N**-1.5 / FOUR_PI


PolyLike = Union[QuadraticPoly, Tuple]


def narrow_convergence_check(lat: ShellLattice, testpoly: PolyLike) -> float:
    """``|int p dmu_N - int p dmu|`` for a polynomial of degree at most two."""
    p = testpoly if isinstance(testpoly, QuadraticPoly) else QuadraticPoly(*testpoly)
    shells = lat.shell_mass * float(np.sum(p.sphere_mean(lat.centers, lat.r)))
    cube = lat.density * p.cube_integral()
    return abs(shells - cube)


def riemann_sum_check(lat: ShellLattice, epsilon: float) -> Tuple[float, float, float]:
    """Riemann sum of ``|x - x_c|^-1`` over centres within ``2 epsilon`` of the central one.

    Returns ``(sum, integral, |sum - integral|)`` with the exact ball integral
    ``int_{|y| <= 2 eps} |y|^-1 dy = 2 pi (2 eps)^2``.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    pts = lat.centers
    central = pts[np.argmin(np.sum((pts - 0.5) ** 2, axis=1))]
    dist = np.sqrt(np.sum((pts - central) ** 2, axis=1))
    sel = (dist > 0) & (dist <= 2.0 * epsilon)
    total = float(np.sum(1.0 / dist[sel])) / lat.N**3
    integral = 2.0 * math.pi * (2.0 * epsilon) ** 2
    return total, integral, abs(total - integral)
