"""Principal Robin eigenvalues, torsional rigidity and the functionals ``lambda * T**q``.

Balls are handled by radial shooting and closed forms, other 2D domains by
P1 finite elements. ``shapelab.experiments`` holds the ball-union families
and the perforated-square sweep; ``shapelab.homog`` the shell-lattice energy
in three dimensions.
"""

__version__ = "0.1.0"

from ._accel import backend_name
from .functionals import F_q, QuantityReport, evaluate, transport_by_scaling, union_quantities
from .geometry import Ball, DisjointUnion, Mesh, PerforatedSquare, Rectangle
from .radial import INF, eig_ball, torsion_ball

__all__ = [
    "INF",
    "Ball",
    "DisjointUnion",
    "F_q",
    "Mesh",
    "PerforatedSquare",
    "QuantityReport",
    "Rectangle",
    "backend_name",
    "eig_ball",
    "evaluate",
    "torsion_ball",
    "transport_by_scaling",
    "union_quantities",
]
