import json
import os
import subprocess
import sys

import pytest

from shapelab import _accel, backend_name

PROBE = """
import json, math
from shapelab import backend_name
from shapelab.fem import _kernels as fk, assemble, solve_eig, solve_torsion
from shapelab.homog import _kernels as hk, ShellLattice, h1_energy
from shapelab import _radial_kernels as rk
from shapelab.geometry import make_perforated_square_mesh
from shapelab.radial import eig_ball
s = assemble(make_perforated_square_mesh(2, 0.5, 16))
print(json.dumps(dict(
    backend=backend_name(),
    kernels=[fk.element_triplets.__name__, fk.pcg.__name__, hk.face_pairs.__name__, hk.inverse_distance_sum.__name__, rk.boundary_functional.__name__],
    lam=solve_eig(s, 1.0).lam, T=solve_torsion(s, 1.0).T, ball=eig_ball(1, 1, 3),
    E=h1_energy(ShellLattice(4, 0.5), 1024, 0).E_N,
)))
"""


def probe(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("SHAPELAB_NUMBA", None)
    else:
        env["SHAPELAB_NUMBA"] = flag
    res = subprocess.run([sys.executable, "-c", PROBE], capture_output=True, text=True, env=env, check=True)
    return json.loads(res.stdout)


@pytest.fixture(scope="module")
def both():
    return probe(None), probe("0")


def test_default_is_numba(both):
    default, _ = both
    assert default["backend"] == "numba"
    assert all(name.endswith("_numba") for name in default["kernels"])


@pytest.mark.parametrize("flag", ["0", "false", "OFF", "no"])
def test_flag_disables(flag):
    out = probe(flag)
    assert out["backend"] == "numpy"
    assert all(name.endswith("_numpy") for name in out["kernels"])


def test_results_agree(both):
    a, b = both
    for key in ("lam", "T", "ball"):
        assert a[key] == pytest.approx(b[key], rel=1e-10)
    assert a["E"] == pytest.approx(b["E"], rel=1e-12)


def test_in_process_flag_matches():
    assert backend_name() == ("numba" if _accel.USE_NUMBA else "numpy")
    assert _accel.pick(1, 2) == (1 if _accel.USE_NUMBA else 2)
