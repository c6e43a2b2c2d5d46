"""Monte-Carlo and lattice-sum kernels for the shell-lattice energy.

Both Monte-Carlo integrands live on the unit square, split into ``m x m``
strata. Each stratum holds two random points, each paired with its antithetic
partner ``(1 - xi)``; ``xi`` has shape ``(m, m, 2, 2)`` (stratum row,
stratum column, pair, coordinate). Kernels return per-stratum pair means of
shape ``(m, m, 2)`` so the caller can form both the estimate and its variance.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit, pick


@njit
def face_pairs_numba(a, b, c, w, xi):
    """Per-stratum sums of ``w * f(a; b*s, c*t)`` with ``f = 1/sqrt(a^2+v^2+w^2)``.

    ``a, b, c, w`` are flat arrays describing one face each.
    """
    m = xi.shape[0]
    out = np.zeros((m, m, 2))
    for i in range(m):
        for j in range(m):
            for p in range(2):
                s1 = (i + xi[i, j, p, 0]) / m
                t1 = (j + xi[i, j, p, 1]) / m
                s2 = (i + 1.0 - xi[i, j, p, 0]) / m
                t2 = (j + 1.0 - xi[i, j, p, 1]) / m
                acc = 0.0
                for f in range(a.shape[0]):
                    aa = a[f] * a[f]
                    v1 = b[f] * s1
                    u1 = c[f] * t1
                    v2 = b[f] * s2
                    u2 = c[f] * t2
                    acc += w[f] * 0.5 * (1.0 / np.sqrt(aa + v1 * v1 + u1 * u1) + 1.0 / np.sqrt(aa + v2 * v2 + u2 * u2))
                out[i, j, p] = acc
    return out


def face_pairs_numpy(a, b, c, w, xi, block=512):
    m = xi.shape[0]
    grid = np.arange(m, dtype=np.float64)
    s1 = (grid[:, None, None] + xi[..., 0]) / m
    t1 = (grid[None, :, None] + xi[..., 1]) / m
    s2 = (grid[:, None, None] + 1.0 - xi[..., 0]) / m
    t2 = (grid[None, :, None] + 1.0 - xi[..., 1]) / m
    out = np.zeros((m, m, 2))
    for lo in range(0, a.shape[0], block):
        sl = slice(lo, lo + block)
        aa = (a[sl] ** 2)[:, None, None, None]
        bb = b[sl][:, None, None, None]
        cc = c[sl][:, None, None, None]
        f1 = 1.0 / np.sqrt(aa + (bb * s1) ** 2 + (cc * t1) ** 2)
        f2 = 1.0 / np.sqrt(aa + (bb * s2) ** 2 + (cc * t2) ** 2)
        out += np.einsum("f,fijp->ijp", w[sl], 0.5 * (f1 + f2))
    return out


face_pairs = pick(face_pairs_numba, face_pairs_numpy)


@njit
def cube_pairs_numba(xi):
    """Per-stratum pair means of ``P(v,w)/sqrt(1+v^2+w^2)``, ``P = 1/6-(v+w)/12+vw/20``."""
    m = xi.shape[0]
    out = np.empty((m, m, 2))
    for i in range(m):
        for j in range(m):
            for p in range(2):
                acc = 0.0
                for flip in range(2):
                    if flip == 0:
                        v = (i + xi[i, j, p, 0]) / m
                        w = (j + xi[i, j, p, 1]) / m
                    else:
                        v = (i + 1.0 - xi[i, j, p, 0]) / m
                        w = (j + 1.0 - xi[i, j, p, 1]) / m
                    poly = 1.0 / 6.0 - (v + w) / 12.0 + v * w / 20.0
                    acc += poly / np.sqrt(1.0 + v * v + w * w)
                out[i, j, p] = 0.5 * acc
    return out


def cube_pairs_numpy(xi):
    m = xi.shape[0]
    grid = np.arange(m, dtype=np.float64)

    def f(v, w):
        return (1.0 / 6.0 - (v + w) / 12.0 + v * w / 20.0) / np.sqrt(1.0 + v * v + w * w)

    v1 = (grid[:, None, None] + xi[..., 0]) / m
    w1 = (grid[None, :, None] + xi[..., 1]) / m
    v2 = (grid[:, None, None] + 1.0 - xi[..., 0]) / m
    w2 = (grid[None, :, None] + 1.0 - xi[..., 1]) / m
    return 0.5 * (f(v1, w1) + f(v2, w2))


cube_pairs = pick(cube_pairs_numba, cube_pairs_numpy)


@njit
def inverse_distance_sum_numba(n):
    """``sum over unordered pairs l<p of 1/|i_l - i_p|`` on the integer grid ``{0..n-1}^3``."""
    # offsets D and -D give the same term, so walk the half space D > 0
    # (lexicographically); offset D occurs prod(n - |D_i|) times
    total = 0.0
    for dx in range(0, n):
        for dy in range(-(n - 1), n):
            if dx == 0 and dy < 0:
                continue
            for dz in range(-(n - 1), n):
                if dx == 0 and dy == 0 and dz <= 0:
                    continue
                mult = (n - dx) * (n - abs(dy)) * (n - abs(dz))
                total += mult / np.sqrt(dx * dx + dy * dy + dz * dz)
    return total


def inverse_distance_sum_numpy(n):
    # group pairs by their difference vector: offset D occurs prod(n - |D_i|) times
    r = np.arange(-(n - 1), n)
    dx, dy, dz = np.meshgrid(r, r, r, indexing="ij")
    mult = (n - np.abs(dx)) * (n - np.abs(dy)) * (n - np.abs(dz))
    dist = np.sqrt(dx**2 + dy**2 + dz**2, dtype=np.float64)
    nz = dist > 0
    return 0.5 * float(np.sum(mult[nz] / dist[nz]))


inverse_distance_sum = pick(inverse_distance_sum_numba, inverse_distance_sum_numpy)
