"""P1 finite elements on 2D triangle meshes."""

from .assembly import AssembledSystem, assemble
from .solvers import (
    CG_TOL,
    EIG_TOL,
    CGNotConverged,
    EigenStagnation,
    SolverError,
    SpectralSolution,
    TorsionSolution,
    cg_solve,
    discrete_F1,
    solve_eig,
    solve_torsion,
)

__all__ = [
    "AssembledSystem",
    "assemble",
    "CG_TOL",
    "EIG_TOL",
    "CGNotConverged",
    "EigenStagnation",
    "SolverError",
    "SpectralSolution",
    "TorsionSolution",
    "cg_solve",
    "discrete_F1",
    "solve_eig",
    "solve_torsion",
]
