"""Fixed-step RK4 integration of the radial eigenvalue ODE on the unit ball.

    u'' + (d-1)/s u' + mu u = 0,  u(0) = 1, u'(0) = 0

Integration starts at ``s0`` with the two-term series ``u = 1 - mu s^2/(2d)``,
``u' = -mu s/d``. The kernels return the boundary functional
``u'(1) + beta u(1)`` (Robin) or ``u(1)`` (Dirichlet) for a batch of ``mu``.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit, pick

S0 = 1e-8


@njit
def boundary_functional_numba(mus, beta, d, nsteps, dirichlet):
    out = np.empty(mus.shape[0])
    h = (1.0 - S0) / nsteps
    c = d - 1.0
    for j in range(mus.shape[0]):
        mu = mus[j]
        s = S0
        u = 1.0 - mu * s * s / (2.0 * d)
        v = -mu * s / d
        for _ in range(nsteps):
            sh = s + 0.5 * h
            s1 = s + h
            k1u = v
            k1v = -c / s * v - mu * u
            u2 = u + 0.5 * h * k1u
            v2 = v + 0.5 * h * k1v
            k2u = v2
            k2v = -c / sh * v2 - mu * u2
            u3 = u + 0.5 * h * k2u
            v3 = v + 0.5 * h * k2v
            k3u = v3
            k3v = -c / sh * v3 - mu * u3
            u4 = u + h * k3u
            v4 = v + h * k3v
            k4u = v4
            k4v = -c / s1 * v4 - mu * u4
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            s = s1
        if dirichlet:
            out[j] = u
        else:
            out[j] = v + beta * u
    return out


def boundary_functional_numpy(mus, beta, d, nsteps, dirichlet):
    mu = np.asarray(mus, dtype=np.float64)
    h = (1.0 - S0) / nsteps
    c = d - 1.0
    s = S0
    u = 1.0 - mu * s * s / (2.0 * d)
    v = -mu * s / d
    for _ in range(nsteps):
        sh = s + 0.5 * h
        s1 = s + h
        k1u = v
        k1v = -c / s * v - mu * u
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2v = -c / sh * v2 - mu * u2
        u3 = u + 0.5 * h * v2
        v3 = v + 0.5 * h * k2v
        k3v = -c / sh * v3 - mu * u3
        u4 = u + h * v3
        v4 = v + h * k3v
        k4v = -c / s1 * v4 - mu * u4
        u = u + h / 6.0 * (k1u + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        s = s1
    return u if dirichlet else v + beta * u


boundary_functional = pick(boundary_functional_numba, boundary_functional_numpy)

# points evaluated per refinement round of the root search: plain bisection
# for the compiled kernel, a vectorised multisection for numpy
SECTIONS = 1 if boundary_functional is boundary_functional_numba else 15
