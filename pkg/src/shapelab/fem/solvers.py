"""Linear and eigenvalue solvers on an assembled P1 system.

Robin problems use ``K = A + beta*Mb``; Dirichlet problems (``beta = INF``)
drop the boundary rows and columns and keep boundary values at zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from ..radial import is_dirichlet
from . import _kernels
from .assembly import AssembledSystem

log = logging.getLogger(__name__)

CG_TOL = 1e-12
EIG_TOL = 1e-10
ROUNDING_SLACK = 10.0


class SolverError(RuntimeError):
    pass


class CGNotConverged(SolverError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(f"CG stopped after {iterations} iterations at relative residual {residual:.3e}")
        self.residual = residual
        self.iterations = iterations


class EigenStagnation(SolverError):
    pass


@dataclass(frozen=True)
class SpectralSolution:
    lam: float
    u: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class TorsionSolution:
    w: np.ndarray
    T: float
    energy: float


def cg_solve(K: csr_matrix, rhs: np.ndarray, tol: float = CG_TOL, x0=None, maxiter=None) -> np.ndarray:
    """Solve ``K x = rhs`` for symmetric positive definite ``K``.

    Jacobi-preconditioned conjugate gradients, capped at ``10 n`` iterations.
    The true residual is re-checked at the end; if rounding has let it drift
    above ``tol`` the iteration is restarted from the current iterate (at most
    three times). After the restarts a true residual within ``ROUNDING_SLACK *
    tol`` is accepted, since that is the attainable floor for large systems.
    """
    K = csr_matrix(K)
    n = K.shape[0]
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    cap = 10 * n if maxiter is None else maxiter
    indptr = K.indptr.astype(np.int64)
    indices = K.indices.astype(np.int64)
    data = K.data.astype(np.float64)
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return np.zeros(n)
    used = 0
    for _ in range(4):
        x, it, _ = _kernels.pcg(indptr, indices, data, rhs, x, tol, cap - used)
        used += it
        true_res = np.linalg.norm(rhs - K @ x) / bnorm
        if true_res <= tol:
            return x
        if used >= cap:
            break
    if true_res <= ROUNDING_SLACK * tol:
        log.debug("CG accepted at true residual %.3e (tol %.1e)", true_res, tol)
        return x
    raise CGNotConverged(true_res, used)


def _robin_or_dirichlet(sys: AssembledSystem, beta):
    if is_dirichlet(beta):
        idx = sys.interior()
        if idx.size == 0:
            raise SolverError("mesh has no interior vertices for the Dirichlet problem")
        return sys.A[idx][:, idx].tocsr(), sys.M[idx][:, idx].tocsr(), sys.b[idx], idx
    if not beta > 0:
        raise ValueError(f"beta must be positive or INF, got {beta}")
    return sys.robin_matrix(beta), sys.M, sys.b, None


def _embed(sys, idx, v):
    if idx is None:
        return v
    full = np.zeros(sys.n)
    full[idx] = v
    return full


def solve_torsion(sys: AssembledSystem, beta=1.0, tol: float = CG_TOL) -> TorsionSolution:
    K, _, b, idx = _robin_or_dirichlet(sys, beta)
    w = cg_solve(K, b, tol)
    T = float(b @ w)
    energy = float(w @ (K @ w))
    return TorsionSolution(w=_embed(sys, idx, w), T=T, energy=energy)


def solve_eig(
    sys: AssembledSystem, beta=1.0, tol: float = EIG_TOL, cg_tol: float = CG_TOL, maxiter: int = 500
) -> SpectralSolution:
    """Principal eigenpair of the pencil ``(K, M)`` by inverse iteration.

    Starts from the constant vector. Stops once successive Rayleigh quotients
    differ by less than ``tol * lam`` and the residual
    ``||K u - lam M u||_2`` (``u`` M-normalised) is below ``tol * max(1, lam)``.
    If ``maxiter/2`` iterations pass without convergence the iteration is
    restarted once from a fixed pseudo-random vector (seed 1).
    """
    K, M, _, idx = _robin_or_dirichlet(sys, beta)
    n = K.shape[0]
    x = np.ones(n)
    restarted = False
    lam_prev = None
    lam = None
    y_guess = None
    for it in range(1, maxiter + 1):
        y = cg_solve(K, M @ x, cg_tol, x0=y_guess)
        y /= np.sqrt(y @ (M @ y))
        Ky = K @ y
        lam = float(y @ Ky)
        res = float(np.linalg.norm(Ky - lam * (M @ y)))
        if lam_prev is not None and abs(lam - lam_prev) < tol * lam and res <= tol * max(1.0, lam):
            return SpectralSolution(lam=lam, u=_embed(sys, idx, y), residual=res, iterations=it)
        lam_prev = lam
        x = y
        y_guess = y / lam
        if it == maxiter // 2 and not restarted:
            log.warning("inverse iteration stagnating at lam=%.12g, restarting from seeded vector", lam)
            restarted = True
            x = np.abs(np.random.default_rng(1).standard_normal(n)) + 0.5
            y_guess = None
            lam_prev = None
    raise EigenStagnation(f"inverse iteration did not converge in {maxiter} steps (last lam={lam})")


def discrete_F1(sys: AssembledSystem, beta=1.0, tol: float = EIG_TOL) -> float:
    """``lam_h * T_h`` on one mesh; never exceeds the mesh area (up to solver error)."""
    return solve_eig(sys, beta, tol).lam * solve_torsion(sys, beta).T


