"""Brute-force quadrature for the lattice energy, independent of the shell theorem.

Used only to cross-check the fast path. Shells are sampled on product grids
(Gauss-Legendre in ``cos theta``, midpoint rule in ``phi``); the cube
potential uses the closed-form antiderivative of ``1/|x|`` over a box.
"""

from __future__ import annotations

import math

import numpy as np

from .lattice import EnergyBreakdown, ShellLattice

FOUR_PI = 4.0 * math.pi


def _antiderivative(x, y, z):
    # d^3 F / dx dy dz = 1/|(x, y, z)| for x, y, z >= 0
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (x, y, z)))
    r = np.sqrt(x * x + y * y + z * z)
    out = np.zeros(x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        for p, q, s in ((y, z, x), (x, z, y), (x, y, z)):
            t = p * q * np.log(s + r)
            out += np.where(p * q > 0, t, 0.0)
        for s, p, q in ((x, y, z), (y, x, z), (z, x, y)):
            t = 0.5 * s * s * np.arctan(p * q / (s * r))
            out -= np.where(s > 0, t, 0.0)
    return out


def box_potential(a, b, c):
    """``int_[0,a]x[0,b]x[0,c] |y|^-1 dy`` in closed form."""
    total = 0.0
    for i, x in enumerate((0.0, a)):
        for j, y in enumerate((0.0, b)):
            for k, z in enumerate((0.0, c)):
                total = total + (-1) ** (3 - i - j - k) * _antiderivative(x, y, z)
    return total


def cube_potential(x) -> np.ndarray:
    """``Phi(x) = int_[0,1]^3 |x - y|^-1 dy`` for points in the closed cube."""
    x = np.asarray(x, dtype=np.float64)
    total = 0.0
    for a in (x[..., 0], 1.0 - x[..., 0]):
        for b in (x[..., 1], 1.0 - x[..., 1]):
            for c in (x[..., 2], 1.0 - x[..., 2]):
                total = total + box_potential(a, b, c)
    return total


def sphere_grid(center, r: float, n: int):
    """Points and weights (summing to one) of a product rule on a sphere."""
    z, wz = np.polynomial.legendre.leggauss(n)
    phi = (np.arange(2 * n) + 0.5) * math.pi / n
    st = np.sqrt(1.0 - z * z)
    pts = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(z, 2 * n),
        ],
        axis=1,
    )
    w = np.repeat(wz / 2.0, 2 * n) / (2 * n)
    return np.asarray(center, dtype=np.float64) + r * pts, w


def pair_energy(x1, x2, r: float, m: float, n: int = 12) -> float:
    p, wp = sphere_grid(x1, r, n)
    q, wq = sphere_grid(x2, r, n)
    dist = np.sqrt(np.sum((p[:, None, :] - q[None, :, :]) ** 2, axis=-1))
    return m * m / FOUR_PI * float(wp @ (1.0 / dist) @ wq)


def self_energy(r: float, m: float, n: int = 64) -> float:
    """Double surface integral on one shell.

    By rotation invariance the outer point sits at the pole; the inner
    integral runs over polar angle ``theta`` from that pole with Gauss nodes
    (which never touch the singular point) and a midpoint rule in ``phi``.
    """
    t, wt = np.polynomial.legendre.leggauss(n)
    theta = 0.5 * math.pi * (t + 1.0)
    wt = 0.5 * math.pi * wt
    phi = (np.arange(2 * n) + 0.5) * math.pi / n
    pole = np.array([0.0, 0.0, r])
    q = r * np.stack(
        [
            np.outer(np.sin(theta), np.cos(phi)),
            np.outer(np.sin(theta), np.sin(phi)),
            np.outer(np.cos(theta), np.ones_like(phi)),
        ],
        axis=-1,
    )
    dist = np.sqrt(np.sum((q - pole) ** 2, axis=-1))
    integrand = r * r * np.sin(theta)[:, None] / dist
    mean = float(wt @ integrand.sum(axis=1)) * (math.pi / n) / (FOUR_PI * r * r)
    return m * m / FOUR_PI * mean


def shell_cube_energy(center, r: float, m: float, c: float, n: int = 16) -> float:
    p, w = sphere_grid(center, r, n)
    return c * m / FOUR_PI * float(w @ cube_potential(p))


def cube_self_energy(c: float, n: int = 24) -> float:
    t, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (t + 1.0)
    w = 0.5 * w
    g = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1)
    W = w[:, None, None] * w[None, :, None] * w[None, None, :]
    return c * c / FOUR_PI * float(np.sum(W * cube_potential(g)))


def h1_energy(lat: ShellLattice, n_sphere: int = 12, n_cube: int = 24) -> EnergyBreakdown:
    """All-quadrature energy; practical for ``N <= 2``."""
    pts, r, m, c = lat.centers, lat.r, lat.shell_mass, lat.density
    s_self = len(pts) * self_energy(r, m, 4 * n_sphere)
    s_cross = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            s_cross += 2.0 * pair_energy(pts[i], pts[j], r, m, n_sphere)
    s_nmu = sum(shell_cube_energy(x, r, m, c, n_sphere) for x in pts)
    return EnergyBreakdown(
        N=lat.N,
        k=lat.k,
        r_N=r,
        S_NN_self=s_self,
        S_NN_cross=s_cross,
        S_Nmu=s_nmu,
        S_mumu=cube_self_energy(c, n_cube),
        mc_stderr=0.0,
        seed=-1,
    )
