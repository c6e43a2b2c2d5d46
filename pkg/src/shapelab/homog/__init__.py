"""Newtonian energy of a lattice of spherical shells against the uniform cube measure (d=3)."""

from .energy import (
    MCEstimate,
    cross_sum,
    cube_potential_sum,
    cube_self_energy,
    h1_energy,
    narrow_convergence_check,
    riemann_sum_check,
    self_energy_closed_form,
    shell_cube_energy,
    shell_pair_energy,
    shell_self_energy,
)
from .lattice import EnergyBreakdown, QuadraticPoly, ShellLattice

__all__ = [
    "EnergyBreakdown",
    "MCEstimate",
    "QuadraticPoly",
    "ShellLattice",
    "cross_sum",
    "cube_potential_sum",
    "cube_self_energy",
    "h1_energy",
    "narrow_convergence_check",
    "riemann_sum_check",
    "self_energy_closed_form",
    "shell_cube_energy",
    "shell_pair_energy",
    "shell_self_energy",
]
