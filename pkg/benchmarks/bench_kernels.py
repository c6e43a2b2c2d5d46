"""Time the numba and numpy variants of every hot kernel on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Both variants are imported directly, so the SHAPELAB_NUMBA flag does not
matter here. The first numba call (compilation) is excluded from the timings.
Results are also cross-checked so a fast but wrong kernel shows up.
"""

import argparse
import time

import numpy as np

from shapelab import _radial_kernels as rk
from shapelab.fem import _kernels as fk
from shapelab.fem import assemble
from shapelab.geometry import make_disk_mesh, make_perforated_square_mesh
from shapelab.homog import _kernels as hk
from shapelab.homog.energy import _draws, _faces
from shapelab.homog.lattice import ShellLattice


def best_of(fn, args, repeat):
    fn(*args)  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def max_rel_diff(a, b):
    if isinstance(a, tuple):
        return max(max_rel_diff(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def cases():
    mesh = make_perforated_square_mesh(8, 1.0, 64)
    yield "element_triplets", fk.element_triplets_numba, fk.element_triplets_numpy, (mesh.vertices, mesh.triangles), f"{mesh.n_triangles} triangles"

    sys = assemble(make_disk_mesh(1.0, 256, 40))
    K = sys.robin_matrix(1.0)
    args = (K.indptr.astype(np.int64), K.indices.astype(np.int64), K.data, sys.b, np.zeros(sys.n), 1e-12, 10 * sys.n)
    yield "pcg", lambda *a: fk.pcg_numba(*a)[0], lambda *a: fk.pcg_numpy(*a)[0], args, f"n={sys.n}"

    mus = np.linspace(0.1, 40.0, 64)
    yield "boundary_functional", rk.boundary_functional_numba, rk.boundary_functional_numpy, (mus, 1.0, 3, 2048, False), "64 mu, 2048 steps"

    a, b, c, w = _faces(ShellLattice(16, 1.0).centers)
    xi = _draws(4096, 0)
    yield "face_pairs", hk.face_pairs_numba, hk.face_pairs_numpy, (a, b, c, w, xi), f"{a.size} faces, 4096 samples"

    xi = _draws(1 << 18, 0)
    yield "cube_pairs", hk.cube_pairs_numba, hk.cube_pairs_numpy, (xi,), "2^18 samples"

    yield "inverse_distance_sum", hk.inverse_distance_sum_numba, hk.inverse_distance_sum_numpy, (12,), "N=12"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<22}{'size':<28}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>9}{'rel diff':>11}")
    for name, fast, slow, inputs, size in cases():
        t_nb, out_nb = best_of(fast, inputs, args.repeat)
        t_np, out_np = best_of(slow, inputs, args.repeat)
        diff = max_rel_diff(out_nb, out_np)
        print(f"{name:<22}{size:<28}{t_nb:>12.4g}{t_np:>12.4g}{t_np / t_nb:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
