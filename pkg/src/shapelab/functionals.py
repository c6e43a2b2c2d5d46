"""Shape functionals ``lambda * T**q`` and the rules used to combine them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from . import radial
from .geometry import Ball, DisjointUnion, DomainSpec, mesh_for_domain, scale_mesh
from .radial import INF, is_dirichlet


@dataclass(frozen=True)
class QuantityReport:
    domain: DomainSpec
    beta: float
    lam: float
    torsion: float
    q: float
    F: float
    solver: str  # "radial" | "fem" | "union"
    mesh_h: float = None

    def __post_init__(self):
        if not (self.lam > 0 and self.torsion > 0):
            raise ValueError(f"lambda and torsion must be positive, got {self.lam}, {self.torsion}")

    CSV_HEADER = ("domain", "beta", "q", "lambda", "torsion", "F", "solver", "mesh_h")

    def csv_row(self) -> Tuple[str, ...]:
        return (
            self.domain.ident(),
            format_beta(self.beta),
            f"{self.q:.17g}",
            f"{self.lam:.17g}",
            f"{self.torsion:.17g}",
            f"{self.F:.17g}",
            self.solver,
            "" if self.mesh_h is None else f"{self.mesh_h:.17g}",
        )


@dataclass(frozen=True)
class PerturbedBallReport:
    c: float
    beta: float
    lambdaBc: float
    torsionLower: float
    m1Lower: float


def format_beta(beta) -> str:
    return "inf" if is_dirichlet(beta) else f"{beta:.17g}"


def parse_beta(text) -> float:
    if isinstance(text, str) and text.strip().lower() in {"inf", "infinity"}:
        return INF
    value = float(text)
    if not (value > 0):
        raise ValueError(f"beta must be positive or 'inf', got {text!r}")
    return value


def F_q(lam: float, torsion: float, q: float) -> float:
    if not (lam > 0 and torsion > 0):
        raise ValueError("lambda and torsion must be positive")
    return lam * torsion**q


def union_quantities(parts: Iterable[Tuple[float, float]]) -> Tuple[float, float]:
    """Eigenvalue and torsion of a disjoint union: min of eigenvalues, sum of torsions."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one part")
    for lam, tor in parts:
        if not (lam > 0 and tor > 0):
            raise ValueError(f"part quantities must be positive, got ({lam}, {tor})")
    return min(p[0] for p in parts), math.fsum(p[1] for p in parts)


def transport_by_scaling(lambda_at_tbeta: float, torsion_at_tbeta: float, t: float, d: int):
    """Quantities of ``t*Omega`` at ``beta`` from those of ``Omega`` at ``t*beta``."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return lambda_at_tbeta * t**-2, torsion_at_tbeta * t ** (d + 2)


def scaled_beta(beta: float, t: float) -> float:
    return INF if is_dirichlet(beta) else t * beta


# --------------------------------------------------------------------------
# evaluation on concrete domains


def ball_report(r: float, beta: float, d: int, q: float, tol: float = 1e-10) -> QuantityReport:
    lam = radial.eig_ball(r, beta, d, tol)
    tor = radial.torsion_ball(r, beta, d)
    return QuantityReport(Ball(r, d), beta, lam, tor, q, F_q(lam, tor, q), "radial")


def fem_quantities(mesh, beta: float, tol: float = 1e-10):
    """(lambda, torsion, h_max, area, perimeter) on one mesh."""
    from .fem import assemble, solve_eig, solve_torsion

    sys = assemble(mesh)
    lam = solve_eig(sys, beta, tol).lam
    tor = solve_torsion(sys, beta).T
    return lam, tor, sys.h_max, sys.area, sys.perimeter


def evaluate(domain: DomainSpec, beta: float, q: float, resolution: int = 64, unit_measure: bool = False):
    """QuantityReport for any domain; balls go through the radial solver.

    With ``unit_measure=True`` the domain is first rescaled to measure one
    (exactly, via the scaling law for balls and unions, by coordinate scaling
    for meshed domains).
    """
    t = domain.measure ** (-1.0 / domain.dim) if unit_measure else 1.0
    if isinstance(domain, Ball):
        return ball_report(domain.radius * t, beta, domain.dim, q)
    if isinstance(domain, DisjointUnion):
        bt = scaled_beta(beta, t)
        parts = [evaluate(p, bt, q, resolution) for p in domain.parts]
        lam, tor = union_quantities((r.lam, r.torsion) for r in parts)
        lam, tor = transport_by_scaling(lam, tor, t, domain.dim)
        return QuantityReport(domain, beta, lam, tor, q, F_q(lam, tor, q), "union")
    mesh = mesh_for_domain(domain, resolution)
    if t != 1.0:
        mesh = scale_mesh(mesh, t)
    lam, tor, h, _, _ = fem_quantities(mesh, beta)
    return QuantityReport(domain, beta, lam, tor, q, F_q(lam, tor, q), "fem", mesh_h=h)


# --------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    slack: float  # positive when the inequality holds
    ok: bool


@dataclass(frozen=True)
class ComparisonDiagnostics:
    checks: Tuple[Check, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __iter__(self):
        return iter(self.checks)


def comparison_check(
    report: QuantityReport, dirichlet: QuantityReport, area: float, perimeter: float, rtol: float = 0.0
) -> ComparisonDiagnostics:
    """Check the four elementary comparison bounds; never raises.

    lambda_beta <= lambda_inf,  lambda_beta <= beta*P/|Omega|,
    T_beta >= T_inf,            T_beta >= |Omega|^2/(beta*P).
    ``rtol`` is a relative allowance for discretisation noise.
    """
    beta = report.beta

    def upper(name, lhs, rhs):
        slack = rhs - lhs
        return Check(name, lhs, rhs, slack, slack >= -rtol * abs(rhs))

    def lower(name, lhs, rhs):
        slack = lhs - rhs
        return Check(name, lhs, rhs, slack, slack >= -rtol * abs(rhs))

    return ComparisonDiagnostics(
        (
            upper("lambda<=lambda_inf", report.lam, dirichlet.lam),
            upper("lambda<=beta*P/A", report.lam, beta * perimeter / area),
            lower("T>=T_inf", report.torsion, dirichlet.torsion),
            lower("T>=A^2/(beta*P)", report.torsion, area**2 / (beta * perimeter)),
        )
    )


def perturbed_ball_curve(beta: float, cs: Sequence[float], d: int) -> List[PerturbedBallReport]:
    """Lower bound ``(lambda_beta(B)+c)/(beta P + c)`` on the unit-measure ball."""
    if is_dirichlet(beta) or not beta > 0:
        raise ValueError("perturbed_ball_curve needs a finite positive beta")
    r = radial.unit_measure_radius(d)
    lam_b = radial.eig_ball(r, beta, d)
    P = d * radial.unit_ball_volume(d) ** (1.0 / d)
    out = []
    for c in cs:
        if c < 0:
            raise ValueError(f"c must be nonnegative, got {c}")
        lam_c = lam_b + c
        t_low = 1.0 / (beta * P + c)
        out.append(PerturbedBallReport(c=c, beta=beta, lambdaBc=lam_c, torsionLower=t_low, m1Lower=lam_c * t_low))
    return out
