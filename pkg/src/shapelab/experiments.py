"""Families of domains whose functionals follow known power laws, and probes.

The ball-union families are evaluated exactly through the radial solver and
the union rules; the perforated-square sweep, the Gagliardo-Nirenberg probe
and the Kohler-Jobin probe go through the FEM pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import radial
from .functionals import F_q, QuantityReport, evaluate, scaled_beta, transport_by_scaling, union_quantities
from .geometry import Ball, DomainSpec, Mesh, PerforatedSquare, Rectangle, make_perforated_square_mesh, mesh_for_domain
from .radial import is_dirichlet


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    points: Tuple[Tuple[float, float], ...]


def slope_fit(points) -> SlopeFit:
    """Least-squares line through ``(log x, log y)``."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points for a slope fit, got {len(pts)}")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("slope_fit needs strictly positive data")
    if len(np.unique(xs)) != len(xs):
        raise ValueError("x values must be distinct")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return SlopeFit(float(slope), float(intercept), r2, tuple(zip(lx.tolist(), ly.tolist())))


def robin_threshold(d: int) -> float:
    return 1.0 / (d + 1)


def dirichlet_threshold(d: int) -> float:
    return 2.0 / (d + 2)


def threshold_exponent(q: float, d: int, beta) -> float:
    """Predicted log-log slope of F_q along the big-ball-plus-dust family."""
    return -2.0 + q * (d + 2) if is_dirichlet(beta) else -1.0 + q * (d + 1)


def divergence_exponent_stated(q: float) -> float:
    """Exponent ``-2 + 2q`` quoted for the many-small-balls family."""
    return -2.0 + 2.0 * q


def divergence_exponent_robin(q: float) -> float:
    """Exponent implied by ``lambda ~ beta/eps`` and ``T ~ eps/(d beta)`` at fixed beta."""
    return -1.0 + q


# --------------------------------------------------------------------------
# ball families


def _check_decreasing(values, name):
    values = list(values)
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly decreasing")
    if any(v <= 0 for v in values):
        raise ValueError(f"{name} must be positive")
    return values


def threshold_points(q: float, d: int, beta, deltas: Sequence[float]) -> List[dict]:
    """``B_delta`` plus ``N`` balls of radius ``delta**(d+2)``, scaled to unit measure."""
    deltas = _check_decreasing(deltas, "deltas")
    w = radial.unit_ball_volume(d)
    rows = []
    for delta in deltas:
        eps = delta ** (d + 2)
        n_small = math.floor((1.0 / w - delta**d) / eps**d)
        if n_small < 1:
            raise ValueError(f"delta={delta} leaves no room for small balls (N < 1)")
        measure = w * (delta**d + n_small * eps**d)
        t = measure ** (-1.0 / d)
        bt = scaled_beta(beta, t)
        lam_big = radial.eig_ball(delta, bt, d)
        lam_small = radial.eig_ball(eps, bt, d)
        if not lam_big < lam_small:
            raise ArithmeticError(f"eigenvalue not monotone in the radius at delta={delta}")
        tor_big = radial.torsion_ball(delta, bt, d)
        tor_small = float(n_small) * radial.torsion_ball(eps, bt, d)
        lam, tor = union_quantities([(lam_big, tor_big), (lam_small, tor_small)])
        lam, tor = transport_by_scaling(lam, tor, t, d)
        rows.append(
            dict(delta=delta, eps=eps, N=float(n_small), scale=t, lam=lam, torsion=tor, F=F_q(lam, tor, q))
        )
    return rows


def threshold_family(q: float, d: int, beta, deltas: Sequence[float]) -> SlopeFit:
    rows = threshold_points(q, d, beta, deltas)
    return slope_fit([(r["delta"], r["F"]) for r in rows])


def divergence_points(q: float, d: int, beta, epsilons: Sequence[float]) -> List[dict]:
    """``N`` equal balls of radius ``eps`` with ``omega_d N eps^d`` rescaled to one."""
    epsilons = _check_decreasing(epsilons, "epsilons")
    w = radial.unit_ball_volume(d)
    rows = []
    for eps in epsilons:
        n_balls = max(1, round(1.0 / (w * eps**d)))
        t = (w * n_balls * eps**d) ** (-1.0 / d)
        bt = scaled_beta(beta, t)
        lam = radial.eig_ball(eps, bt, d)
        tor = float(n_balls) * radial.torsion_ball(eps, bt, d)
        lam, tor = transport_by_scaling(lam, tor, t, d)
        rows.append(dict(eps=eps, N=float(n_balls), scale=t, lam=lam, torsion=tor, F=F_q(lam, tor, q)))
    return rows


def divergence_family(q: float, d: int, beta, epsilons: Sequence[float]) -> SlopeFit:
    if not q < 1:
        raise ValueError(f"the divergence family is meant for q < 1, got {q}")
    rows = divergence_points(q, d, beta, epsilons)
    return slope_fit([(r["eps"], r["F"]) for r in rows])


# --------------------------------------------------------------------------
# perforated square


@dataclass(frozen=True)
class HomogenizationRow:
    N: int
    k: float
    beta: float
    lam: float
    torsion: float
    F1: float
    target_lambda: float
    target_F1: float
    area: float
    perimeter: float
    h_max: float


def homogenization_targets(beta: float, k: float, d: int = 2) -> Tuple[float, float]:
    """Limit density ``beta*sigma*k^(d-1)`` and the resulting lower bound on F_1."""
    sigma = radial.sphere_area(d)
    mass = sigma * k ** (d - 1)
    outer = 2.0 * d  # (d-1)-measure of the unit cube boundary
    return beta * mass, mass / (outer + mass)


def homogenization_sweep(beta: float, k: float, Ns: Sequence[int], cell_resolution: int = 32) -> List[HomogenizationRow]:
    from .fem import assemble, solve_eig, solve_torsion

    if is_dirichlet(beta) or not beta > 0:
        raise ValueError("the homogenization sweep needs a finite positive beta")
    target_lam, target_f1 = homogenization_targets(beta, k, 2)
    rows = []
    for N in sorted(Ns):
        mesh = make_perforated_square_mesh(N, k, cell_resolution)
        sys = assemble(mesh)
        lam = solve_eig(sys, beta).lam
        tor = solve_torsion(sys, beta).T
        rows.append(
            HomogenizationRow(
                N=N,
                k=k,
                beta=beta,
                lam=lam,
                torsion=tor,
                F1=lam * tor,
                target_lambda=target_lam,
                target_F1=target_f1,
                area=sys.area,
                perimeter=sys.perimeter,
                h_max=sys.h_max,
            )
        )
    return rows


# --------------------------------------------------------------------------
# probes


def default_corpus() -> Tuple[DomainSpec, ...]:
    """Disk and square of unit area, the 2 x 0.5 rectangle, the perforated square N=4, k=1."""
    return (
        Ball(1.0 / math.sqrt(math.pi), 2),
        Rectangle(1.0, 1.0),
        Rectangle(2.0, 0.5),
        PerforatedSquare(4, 1.0),
    )


# base resolution per corpus shape; each refinement level doubles it
_BASE_RESOLUTION = {Ball: 96, Rectangle: 32, PerforatedSquare: 16}


def corpus_resolution(domain: DomainSpec, level: int = 0) -> int:
    base = _BASE_RESOLUTION.get(type(domain), 64)
    if isinstance(domain, Rectangle):
        base = int(round(base * max(domain.width, domain.height)))
    return base * 2**level


def corpus_meshes(corpus: Sequence[DomainSpec] = (), level: int = 0) -> List[Mesh]:
    corpus = corpus or default_corpus()
    return [mesh_for_domain(dom, corpus_resolution(dom, level)) for dom in corpus]


def gn_ratio(mesh: Mesh, beta: float, d: int = 2) -> float:
    """``||u||_2^2 / (E(u)^(d/(d+1)) ||u||_1^(2/(d+1)))`` for the Robin eigenfunction.

    ``E(u) = int |grad u|^2 + int_boundary u^2`` (unit weight on the boundary
    term whatever ``beta`` was used to compute ``u``).
    """
    from .fem import assemble, solve_eig

    sys = assemble(mesh)
    u = solve_eig(sys, beta).u
    l2sq = float(u @ (sys.M @ u))
    energy = float(u @ (sys.A @ u) + u @ (sys.Mb @ u))
    l1 = float(np.abs(u) @ (sys.M @ np.ones(sys.n)))
    return l2sq / (energy ** (d / (d + 1)) * l1 ** (2.0 / (d + 1)))


def gn_probe(meshes: Sequence[Mesh], beta: float = 1.0) -> float:
    """Empirical Gagliardo-Nirenberg constant: max of ``gn_ratio`` over meshes."""
    from .geometry import mesh_stats

    if not meshes:
        raise ValueError("need at least one mesh")
    for m in meshes:
        a = mesh_stats(m).area
        if not 0.5 <= a <= 2.0:
            raise ValueError(f"gn_probe expects meshes of area within a factor 2 of 1, got {a}")
    return max(gn_ratio(m, beta) for m in meshes)


@dataclass(frozen=True)
class KJReport:
    """Outcome of the Kohler-Jobin probe. Exploratory: reported, never asserted."""

    q: float
    beta: float
    ball_F: float
    values: Tuple[Tuple[str, float], ...]
    direction: str  # "ball_minimizes" | "ball_maximizes" | "none"
    violations: Tuple[str, ...] = field(default_factory=tuple)
    label: str = "EXPLORATORY"

    @property
    def min_F(self) -> float:
        return min(v for _, v in self.values)

    @property
    def max_F(self) -> float:
        return max(v for _, v in self.values)

    @property
    def gaps(self) -> Tuple[Tuple[str, float], ...]:
        return tuple((name, v - self.ball_F) for name, v in self.values)


def kj_probe(q: float, beta: float, corpus: Sequence[DomainSpec] = (), resolution: Optional[int] = None, d: int = 2) -> KJReport:
    """Compare ``F_q`` on unit-measure corpus domains with the unit-measure ball.

    For ``q <= 1/(d+1)`` the conjectured direction is that the ball
    minimises; for ``q > 1`` that it maximises. Between the two no direction
    is flagged. ``resolution=None`` uses the corpus default per shape.
    """
    corpus = corpus or default_corpus()
    ball = evaluate(Ball(radial.unit_measure_radius(d), d), beta, q)
    values = []
    for dom in corpus:
        res = corpus_resolution(dom) if resolution is None else resolution
        rep: QuantityReport = evaluate(dom, beta, q, res, unit_measure=True)
        values.append((dom.ident(), float(rep.F)))
    if q <= robin_threshold(d):
        direction = "ball_minimizes"
        violations = tuple(name for name, v in values if v < ball.F)
    elif q > 1.0:
        direction = "ball_maximizes"
        violations = tuple(name for name, v in values if v > ball.F)
    else:
        direction = "none"
        violations = ()
    return KJReport(q=q, beta=beta, ball_F=float(ball.F), values=tuple(values), direction=direction, violations=violations)
