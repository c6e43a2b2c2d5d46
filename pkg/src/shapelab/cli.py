"""Command-line front end.

    shapelab eig --domain ball --r 1 --beta 1 --d 2
    shapelab torsion --domain disk --beta inf --resolution 128
    shapelab experiment threshold --q 0.5 --d 2 --beta 1 --deltas 1e-1:1e-3:geom:7 --svg
    shapelab mesh make --domain perforated --N 4 --k 1 --resolution 32 --name cell

Experiments always write a CSV table; point commands write one with
``--save``. Files go to ``--out`` (default: ``$SHAPELAB_OUT`` or the current
directory) and are never overwritten. Exit codes: 0 success, 1 invalid input,
2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, experiments, radial
from .fem import SolverError
from .functionals import F_q, fem_quantities, format_beta, parse_beta
from .geometry import Ball, PerforatedSquare, Rectangle, mesh_for_domain, mesh_stats, read_mesh, validate_mesh, write_mesh
from .radial import BracketError

log = logging.getLogger("shapelab")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# --------------------------------------------------------------------------
# value parsing


def parse_range(text: str) -> List[float]:
    """``lo:hi:geom:n``, ``lo:hi:lin:n`` or a comma separated list."""
    parts = text.split(":")
    if len(parts) == 1:
        vals = [float(v) for v in text.split(",") if v.strip()]
        if not vals:
            raise UsageError(f"empty value list {text!r}")
        return vals
    if len(parts) != 4:
        raise UsageError(f"range must look like lo:hi:geom:n or lo:hi:lin:n, got {text!r}")
    lo, hi, kind, n = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
    if n < 2:
        raise UsageError(f"a range needs at least 2 points, got {n}")
    if kind == "geom":
        if not (lo > 0 and hi > 0):
            raise UsageError("geometric ranges need positive endpoints")
        return np.geomspace(lo, hi, n).tolist()
    if kind == "lin":
        return np.linspace(lo, hi, n).tolist()
    raise UsageError(f"unknown range kind {kind!r} (use geom or lin)")


def parse_int_list(text: str) -> List[int]:
    vals = parse_range(text)
    if any(v != int(v) for v in vals):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _beta_arg(text: str) -> float:
    try:
        return parse_beta(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --------------------------------------------------------------------------
# config echo and tables


# options that only say where output goes; everything else is echoed
_LOCATION_KEYS = {"out", "name", "func", "verbose"}


@dataclass(frozen=True)
class RunConfig:
    command: Tuple[str, ...]
    params: Tuple[Tuple[str, object], ...]

    @classmethod
    def from_namespace(cls, command, ns: argparse.Namespace) -> "RunConfig":
        items = []
        for key, value in sorted(vars(ns).items()):
            if key in _LOCATION_KEYS or key.startswith("_"):
                continue
            if isinstance(value, float):
                value = format_beta(value) if key == "beta" else repr(value)
            items.append((key, value))
        return cls(tuple(command), tuple(items))

    def echo(self) -> str:
        return json.dumps({"command": list(self.command), "params": [list(p) for p in self.params]}, sort_keys=True)

    @classmethod
    def from_echo(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        return cls(tuple(data["command"]), tuple((k, v) for k, v in data["params"]))

    def to_argv(self) -> List[str]:
        argv = list(self.command)
        for key, value in self.params:
            flag = "--" + key.replace("_", "-")
            if value is True:
                argv.append(flag)
            elif value is False or value is None:
                continue
            else:
                argv += [flag, str(value)]
        return argv


@dataclass
class ResultTable:
    header: Tuple[str, ...]
    rows: List[Tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, row):
        if len(row) != len(self.header):
            raise ValueError(f"row has {len(row)} fields, header has {len(self.header)}")
        self.rows.append(tuple(row))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        meta = {}
        lines = text.splitlines()
        body = []
        for line in lines:
            if line.startswith("# ") and not body:
                key, _, value = line[2:].partition(": ")
                meta[key] = value
            else:
                body.append(line)
        reader = csv.reader(body)
        header = tuple(next(reader))
        return cls(header, [tuple(r) for r in reader], meta)


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return "inf" if math.isinf(v) else f"{float(v):.17g}"
    return str(v)


def output_dir(args) -> Path:
    return Path(args.out or os.environ.get("SHAPELAB_OUT") or ".")


def fresh_path(directory: Path, stem: Optional[str], default_stem: str, suffix: str) -> Path:
    """A path that does not exist yet; user-named paths that exist are refused."""
    directory.mkdir(parents=True, exist_ok=True)
    if stem:
        path = directory / (stem if stem.endswith(suffix) else stem + suffix)
        if path.exists():
            raise UsageError(f"refusing to overwrite existing file {path}")
        return path
    base = f"{default_stem}-{time.strftime('%Y%m%d-%H%M%S')}"
    path = directory / (base + suffix)
    i = 1
    while path.exists():
        path = directory / f"{base}-{i}{suffix}"
        i += 1
    return path


def _write_table(args, config: RunConfig, table: ResultTable, started: float) -> Path:
    table.metadata = {
        "shapelab": __version__,
        "config": config.echo(),
        "wall_time_s": f"{time.perf_counter() - started:.3f}",
        **table.metadata,
    }
    path = fresh_path(output_dir(args), args.name, "-".join(config.command), ".csv")
    path.write_text(table.to_csv(), encoding="utf-8", newline="\n")
    return path


def _write_svg(args, config: RunConfig, text: str) -> Path:
    stem = None if not args.name else args.name.removesuffix(".csv")
    path = fresh_path(output_dir(args), stem, "-".join(config.command), ".svg")
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Ordered map; a process pool when ``jobs > 1``."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# domains


def domain_from_args(args):
    kind = args.domain
    if kind == "ball":
        return Ball(args.r, args.d)
    if kind == "disk":
        return Ball(args.r, 2)
    if kind == "square":
        return Rectangle(args.width, args.width)
    if kind == "rect":
        return Rectangle(args.width, args.height)
    if kind == "perforated":
        if args.N is None:
            raise UsageError("--N is required for --domain perforated")
        return PerforatedSquare(args.N, args.k)
    raise UsageError(f"unknown domain {kind!r}")


def _add_domain(p, resolution=128):
    p.add_argument("--domain", choices=("ball", "disk", "square", "rect", "perforated"), default="ball")
    p.add_argument("--r", type=float, default=1.0, help="ball radius")
    p.add_argument("--d", type=int, default=2, help="dimension (balls only; meshes are 2D)")
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--N", type=int, default=None, help="holes per side of the perforated square")
    p.add_argument("--k", type=float, default=1.0, help="hole size constant")
    p.add_argument("--resolution", type=int, default=resolution)


def _add_output(p, svg=False):
    p.add_argument("--out", default=None, help="output directory (default $SHAPELAB_OUT or .)")
    p.add_argument("--name", default=None, help="output file stem (must not exist)")
    if svg:
        p.add_argument("--svg", action="store_true", help="also write a log-log plot")


# --------------------------------------------------------------------------
# point commands


def _point(args, config, started, what: str) -> int:
    dom = domain_from_args(args)
    q = getattr(args, "q", 1.0)
    if args.domain == "ball":
        lam = radial.eig_ball(dom.radius, args.beta, dom.dim, args.tol) if what != "torsion" else None
        tor = radial.torsion_ball(dom.radius, args.beta, dom.dim)
        solver, h = "radial", ""
    else:
        # the disk is meshed on purpose; use --domain ball for the radial solver
        lam, tor, h, _, _ = fem_quantities(mesh_for_domain(dom, args.resolution), args.beta, args.tol)
        solver = "fem"
    value = {"eig": lam, "torsion": tor}.get(what) if what != "functional" else F_q(lam, tor, q)
    label = {"eig": "lambda", "torsion": "torsion", "functional": "F"}[what]
    print(f"{label} = {value:.15g}  ({dom.ident()}, beta={format_beta(args.beta)}, solver={solver})")
    if args.save:
        table = ResultTable(("domain", "beta", label, "solver", "mesh_h"))
        table.add((dom.ident(), format_beta(args.beta), value, solver, h))
        print(f"wrote {_write_table(args, config, table, started)}")
    return EXIT_OK


# --------------------------------------------------------------------------
# experiments


def _threshold_point(job):
    q, d, beta, delta = job
    return experiments.threshold_points(q, d, beta, [delta])[0]


def _divergence_point(job):
    q, d, beta, eps = job
    return experiments.divergence_points(q, d, beta, [eps])[0]


def _homog_point(job):
    beta, k, N, res = job
    return experiments.homogenization_sweep(beta, k, [N], res)[0]


def _h1_point(job):
    from .homog import ShellLattice, h1_energy

    N, k, samples, seed = job
    return h1_energy(ShellLattice(N, k), samples, seed)


def _family(args, config, started, kind: str) -> int:
    if kind == "threshold":
        xs = args.deltas
        experiments._check_decreasing(xs, "deltas")
        rows = _pmap(_threshold_point, [(args.q, args.d, args.beta, x) for x in xs], args.jobs)
        expected = experiments.threshold_exponent(args.q, args.d, args.beta)
        xkey, header = "delta", ("delta", "eps", "N", "scale", "lambda", "torsion", "F")
        keys = ("delta", "eps", "N", "scale", "lam", "torsion", "F")
    else:
        if not args.q < 1:
            raise UsageError(f"the divergence family needs q < 1, got {args.q}")
        xs = args.epsilons
        experiments._check_decreasing(xs, "epsilons")
        rows = _pmap(_divergence_point, [(args.q, args.d, args.beta, x) for x in xs], args.jobs)
        expected = experiments.divergence_exponent_stated(args.q)
        xkey, header = "eps", ("eps", "N", "scale", "lambda", "torsion", "F")
        keys = ("eps", "N", "scale", "lam", "torsion", "F")
    fit = experiments.slope_fit([(r[xkey], r["F"]) for r in rows])
    table = ResultTable(header)
    for r in rows:
        table.add(tuple(r[k] for k in keys))
    table.metadata = {"fit": f"slope={fit.slope:.17g} intercept={fit.intercept:.17g} r2={fit.r2:.17g}", "expected_slope": f"{expected:.17g}"}
    path = _write_table(args, config, table, started)
    print(f"slope = {fit.slope:.6f} (expected {expected:.6f}, r2 = {fit.r2:.6f}); wrote {path}")
    if args.svg:
        from .svg import emit_svg

        text = emit_svg(
            {f"beta={format_beta(args.beta)}": [(r[xkey], r["F"]) for r in rows]},
            labels={"x": xkey, "y": f"F_q, q={args.q:g}"},
            reference_slopes=(expected,),
        )
        print(f"wrote {_write_svg(args, config, text)}")
    return EXIT_OK


def _homogenize(args, config, started) -> int:
    Ns = sorted(args.Ns)
    for N in Ns:
        PerforatedSquare(N, args.k)  # reject infeasible lattices before any solve
    rows = _pmap(_homog_point, [(args.beta, args.k, N, args.cell_resolution) for N in Ns], args.jobs)
    header = ("N", "k", "beta", "lambda", "torsion", "F1", "target_lambda", "target_F1", "area", "perimeter", "h_max")
    table = ResultTable(header)
    for r in rows:
        table.add((r.N, r.k, r.beta, r.lam, r.torsion, r.F1, r.target_lambda, r.target_F1, r.area, r.perimeter, r.h_max))
    path = _write_table(args, config, table, started)
    last = rows[-1]
    print(f"N={last.N}: lambda = {last.lam:.6f}, F1 = {last.F1:.6f} (target {last.target_F1:.4f}); wrote {path}")
    return EXIT_OK


def _h1decay(args, config, started) -> int:
    from .homog import EnergyBreakdown, ShellLattice

    Ns = sorted(args.Ns)
    for N in Ns:
        ShellLattice(N, args.k)
    rows = _pmap(_h1_point, [(N, args.k, args.samples, args.seed) for N in Ns], args.jobs)
    table = ResultTable(EnergyBreakdown.CSV_HEADER)
    for r in rows:
        table.add(r.csv_row())
    path = _write_table(args, config, table, started)
    summary = ", ".join(f"E_{r.N}={r.E_N:.4g}" for r in rows)
    print(f"{summary}; wrote {path}")
    if args.svg:
        from .svg import emit_svg

        text = emit_svg({f"k={args.k:g}": [(r.N, r.E_N) for r in rows]}, labels={"x": "N", "y": "E_N"})
        print(f"wrote {_write_svg(args, config, text)}")
    return EXIT_OK


def _gn(args, config, started) -> int:
    corpus = experiments.default_corpus()
    meshes = experiments.corpus_meshes(corpus, args.level)
    ratios = [experiments.gn_ratio(m, args.beta) for m in meshes]
    table = ResultTable(("domain", "level", "ratio"))
    for dom, val in zip(corpus, ratios):
        table.add((dom.ident(), args.level, val))
    path = _write_table(args, config, table, started)
    print(f"empirical constant = {max(ratios):.6f}; wrote {path}")
    return EXIT_OK


def _kj(args, config, started) -> int:
    rep = experiments.kj_probe(args.q, args.beta, resolution=args.resolution)
    table = ResultTable(("domain", "F", "gap_to_ball", "violation"))
    table.add(("ball", rep.ball_F, 0.0, False))
    for (name, val), (_, gap) in zip(rep.values, rep.gaps):
        table.add((name, val, gap, name in rep.violations))
    table.metadata = {"label": rep.label, "direction": rep.direction}
    path = _write_table(args, config, table, started)
    print(f"{rep.label}: ball F = {rep.ball_F:.6f}, corpus range [{rep.min_F:.6f}, {rep.max_F:.6f}], "
          f"violations: {len(rep.violations)}; wrote {path}")
    return EXIT_OK


# --------------------------------------------------------------------------
# mesh commands


def _mesh_make(args, config, started) -> int:
    dom = domain_from_args(args)
    mesh = mesh_for_domain(dom, args.resolution)
    stats = validate_mesh(mesh)
    path = fresh_path(output_dir(args), args.name, "mesh", ".mesh")
    write_mesh(mesh, path)
    print(f"{mesh.n_vertices} vertices, {mesh.n_triangles} triangles, h_max = {stats.h_max:.4g}; wrote {path}")
    return EXIT_OK


def _mesh_stats(args, config, started) -> int:
    mesh = read_mesh(args.input)
    stats = mesh_stats(mesh)
    print(
        f"vertices={mesh.n_vertices} triangles={mesh.n_triangles} holes={mesh.n_holes()} "
        f"area={stats.area:.12g} perimeter={stats.perimeter:.12g} h_max={stats.h_max:.6g} "
        f"min_angle={stats.min_angle:.3f}"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shapelab", description="Robin eigenvalues, torsion and shape functionals.")
    parser.add_argument("--version", action="version", version=f"shapelab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for what in ("eig", "torsion", "functional"):
        p = sub.add_parser(what)
        _add_domain(p)
        p.add_argument("--beta", type=_beta_arg, default=1.0)
        if what == "functional":
            p.add_argument("--q", type=float, default=1.0)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--save", action="store_true", help="write a one-row CSV")
        _add_output(p)
        p.set_defaults(func=lambda a, c, s, w=what: _point(a, c, s, w), _command=(what,))

    exp = sub.add_parser("experiment")
    esub = exp.add_subparsers(dest="experiment", required=True)

    for kind, xflag, default in (("threshold", "--deltas", "1e-1:1e-3:geom:7"), ("divergence", "--epsilons", "1e-1:1e-3:geom:7")):
        p = esub.add_parser(kind)
        p.add_argument("--q", type=float, required=True)
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--beta", type=_beta_arg, default=1.0)
        p.add_argument(xflag, type=parse_range, default=None, help="range lo:hi:geom:n, lo:hi:lin:n or a,b,c")
        p.add_argument("--jobs", type=int, default=1)
        _add_output(p, svg=True)
        p.set_defaults(func=lambda a, c, s, k=kind: _family(a, c, s, k), _command=("experiment", kind), _range_default=default)

    p = esub.add_parser("homogenize")
    p.add_argument("--beta", type=_beta_arg, default=1.0)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--Ns", type=parse_int_list, default=[4, 8, 12])
    p.add_argument("--cell-resolution", type=int, default=32)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=_homogenize, _command=("experiment", "homogenize"))

    p = esub.add_parser("h1decay")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--Ns", type=parse_int_list, default=[8, 16])
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p, svg=True)
    p.set_defaults(func=_h1decay, _command=("experiment", "h1decay"))

    p = esub.add_parser("gn")
    p.add_argument("--beta", type=_beta_arg, default=1.0)
    p.add_argument("--level", type=int, default=0, help="uniform refinement level of the corpus meshes")
    _add_output(p)
    p.set_defaults(func=_gn, _command=("experiment", "gn"))

    p = esub.add_parser("kj")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=_beta_arg, default=1.0)
    p.add_argument("--resolution", type=int, default=None)
    _add_output(p)
    p.set_defaults(func=_kj, _command=("experiment", "kj"))

    mesh = sub.add_parser("mesh")
    msub = mesh.add_subparsers(dest="mesh_command", required=True)
    p = msub.add_parser("make")
    _add_domain(p, resolution=64)
    _add_output(p)
    p.set_defaults(func=_mesh_make, _command=("mesh", "make"))
    p = msub.add_parser("stats")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_mesh_stats, _command=("mesh", "stats"), out=None, name=None)
    return parser


def parse_args(argv: Sequence[str]) -> Tuple[argparse.Namespace, RunConfig]:
    args = build_parser().parse_args(list(argv))
    for attr in ("deltas", "epsilons"):
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, parse_range(args._range_default))
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be at least 1")
    return args, config_of(args)


def config_of(args: argparse.Namespace) -> RunConfig:
    ns = argparse.Namespace(**{k: v for k, v in vars(args).items() if k not in ("command", "experiment", "mesh_command")})
    for attr in ("deltas", "epsilons", "Ns"):
        if getattr(ns, attr, None) is not None:
            setattr(ns, attr, ",".join(repr(v) for v in getattr(ns, attr)))
    return RunConfig.from_namespace(args._command, ns)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, config = parse_args(argv)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        return args.func(args, config, started)
    except (SolverError, BracketError, ArithmeticError, RuntimeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
