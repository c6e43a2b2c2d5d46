from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from ..geometry import Mesh, mesh_stats
from . import _kernels


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Stiffness ``A``, mass ``M``, boundary mass ``Mb`` and loads ``b`` of a mesh.

    The matrices are ``scipy.sparse.csr_matrix`` with the full symmetric
    pattern stored.
    """

    A: csr_matrix
    M: csr_matrix
    Mb: csr_matrix
    b: np.ndarray
    area: float
    perimeter: float
    h_max: float
    mesh: Mesh

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def interior(self) -> np.ndarray:
        return self.mesh.interior_vertices()

    def robin_matrix(self, beta: float) -> csr_matrix:
        return (self.A + beta * self.Mb).tocsr()

    def boundary_integrals(self, u: np.ndarray) -> dict:
        """``int u^2`` over each tagged boundary component."""
        mesh = self.mesh
        out = {}
        for tag in np.unique(mesh.boundary_tags):
            edges = mesh.boundary_edges[mesh.boundary_tags == tag]
            rows, cols, vals = _kernels.edge_triplets(mesh.vertices, edges)
            out[int(tag)] = float(np.sum(vals * u[rows] * u[cols]))
        return out


def _to_csr(rows, cols, vals, n):
    mat = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def assemble(mesh: Mesh) -> AssembledSystem:
    """Exact P1 integrals on ``mesh``.

    Raises ``DegenerateTriangleError`` for a triangle with non-positive area.
    """
    stats = mesh_stats(mesh)  # raises on degenerate triangles
    n = mesh.n_vertices
    rows, cols, kvals, mvals, loads = _kernels.element_triplets(mesh.vertices, mesh.triangles)
    A = _to_csr(rows, cols, kvals, n)
    M = _to_csr(rows, cols, mvals, n)
    brows, bcols, bvals = _kernels.edge_triplets(mesh.vertices, mesh.boundary_edges)
    Mb = _to_csr(brows, bcols, bvals, n)
    return AssembledSystem(
        A=A,
        M=M,
        Mb=Mb,
        b=loads,
        area=stats.area,
        perimeter=stats.perimeter,
        h_max=stats.h_max,
        mesh=mesh,
    )
