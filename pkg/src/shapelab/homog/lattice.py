from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SIGMA_2 = 4.0 * math.pi  # area of the unit sphere in R^3


@dataclass(frozen=True)
class ShellLattice:
    """``N^3`` uniform spherical shells of radius ``k N^(-3/2)`` centred on the cells of ``[0,1]^3``.

    Each shell carries surface measure of total mass ``4 pi r^2``; the whole
    lattice has mass ``4 pi k^2`` for every ``N``.
    """

    N: int
    k: float
    d: int = 3

    def __post_init__(self):
        if self.d != 3:
            raise ValueError(f"shell lattices are implemented for d=3 only, got d={self.d}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if not 2.0 * self.r < 1.0 / self.N:
            raise ValueError(
                f"shells overlap or leave their cells: 2 r_N = {2 * self.r:.6g} >= 1/N = {1 / self.N:.6g} "
                f"(needs N > 4 k^2 = {4 * self.k**2:.6g})"
            )

    @property
    def r(self) -> float:
        return self.k * self.N ** (-self.d / (self.d - 1))

    @property
    def shell_mass(self) -> float:
        return SIGMA_2 * self.r**2

    @property
    def total_mass(self) -> float:
        return self.N**3 * self.shell_mass

    @property
    def density(self) -> float:
        """Density ``c = 4 pi k^2`` of the uniform limit measure on the unit cube."""
        return SIGMA_2 * self.k**2

    @property
    def axis(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) / self.N

    @cached_property
    def centers(self) -> np.ndarray:
        x = self.axis
        g = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1)
        out = g.reshape(-1, 3)
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class EnergyBreakdown:
    """Newtonian energy ``<G*nu, nu>`` of ``nu = mu_N - mu`` split into its four parts."""

    N: int
    k: float
    r_N: float
    S_NN_self: float
    S_NN_cross: float
    S_Nmu: float
    S_mumu: float
    mc_stderr: float
    seed: int

    @property
    def E_N(self) -> float:
        return self.S_NN_self + self.S_NN_cross - 2.0 * self.S_Nmu + self.S_mumu

    CSV_HEADER = ("N", "k", "r_N", "S_NN_self", "S_NN_cross", "S_Nmu", "S_mumu", "E_N", "mc_stderr", "seed")

    def csv_row(self):
        vals = (self.k, self.r_N, self.S_NN_self, self.S_NN_cross, self.S_Nmu, self.S_mumu, self.E_N, self.mc_stderr)
        return (str(self.N),) + tuple(f"{v:.17g}" for v in vals) + (str(self.seed),)


@dataclass(frozen=True)
class QuadraticPoly:
    """``p(x) = c0 + g.x + x^T H x`` on R^3."""

    c0: float = 0.0
    g: tuple = (0.0, 0.0, 0.0)
    H: tuple = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        H = np.asarray(self.H, dtype=float)
        if g.shape != (3,) or H.shape != (3, 3):
            raise ValueError("g must have 3 entries and H must be 3x3")
        object.__setattr__(self, "g", tuple(g))
        object.__setattr__(self, "H", tuple(map(tuple, 0.5 * (H + H.T))))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        H = np.asarray(self.H)
        return self.c0 + x @ np.asarray(self.g) + np.einsum("...i,ij,...j->...", x, H, x)

    def sphere_mean(self, center: np.ndarray, r: float) -> np.ndarray:
        """Mean over the sphere ``|x - center| = r``: ``p(center) + r^2/3 * tr H``."""
        return self(center) + r * r / 3.0 * float(np.trace(np.asarray(self.H)))

    def cube_integral(self) -> float:
        H = np.asarray(self.H)
        off = float(H.sum() - np.trace(H))
        return self.c0 + 0.5 * sum(self.g) + float(np.trace(H)) / 3.0 + off / 4.0
