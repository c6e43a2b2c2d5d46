import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from shapelab.geometry import (
    Ball,
    DegenerateTriangleError,
    DisjointUnion,
    Mesh,
    MeshError,
    PerforatedSquare,
    Rectangle,
    area_of_inscribed_polygon,
    hole_radius,
    make_disk_mesh,
    make_perforated_square_mesh,
    make_rect_mesh,
    mesh_for_domain,
    mesh_stats,
    perimeter_of_inscribed_polygon,
    read_mesh,
    scale_mesh,
    validate_mesh,
    write_mesh,
)


def euler_characteristic(mesh):
    return mesh.n_vertices - len(mesh.edges()) + mesh.n_triangles


class TestHoleRadius:
    def test_values(self):
        assert hole_radius(1, 0.1, 2) == pytest.approx(0.1, rel=1e-15)
        assert hole_radius(4, 1.0, 2) == pytest.approx(0.0625, rel=1e-15)
        assert hole_radius(8, 1.0, 3) == pytest.approx(math.exp(-1.5 * math.log(8)), rel=1e-14)

    @pytest.mark.parametrize("N,k", [(2, 10.0), (2, 1.0), (4, 2.0)])
    def test_touching_holes_rejected(self, N, k):
        with pytest.raises(ValueError):
            hole_radius(N, k, 2)

    @pytest.mark.parametrize("N,k,d", [(0, 1.0, 2), (2, -1.0, 2), (2, 0.1, 1)])
    def test_bad_arguments(self, N, k, d):
        with pytest.raises(ValueError):
            hole_radius(N, k, d)


class TestDomains:
    def test_measures(self):
        assert Ball(2.0, 3).measure == pytest.approx(4 * math.pi / 3 * 8)
        assert Rectangle(2.0, 0.5).measure == 1.0
        assert PerforatedSquare(4, 1.0).measure == pytest.approx(1 - 16 * math.pi / 256)
        u = DisjointUnion((Ball(1.0), Ball(0.5)))
        assert u.measure == pytest.approx(1.25 * math.pi)
        assert u.dim == 2

    def test_union_dimension_mismatch(self):
        with pytest.raises(ValueError):
            DisjointUnion((Ball(1.0, 2), Ball(1.0, 3)))

    def test_invalid(self):
        with pytest.raises(ValueError):
            Ball(0.0)
        with pytest.raises(ValueError):
            Rectangle(1.0, -1.0)
        with pytest.raises(ValueError):
            PerforatedSquare(2, 1.0)

    def test_ident_distinguishes(self):
        assert Rectangle(1, 2).ident() != Rectangle(2, 1).ident()


class TestDisk:
    def test_octagon(self):
        m = make_disk_mesh(1.0, 8, 2)
        s = validate_mesh(m)
        assert s.perimeter == pytest.approx(16 * math.sin(math.pi / 8), rel=1e-12)
        assert s.area == pytest.approx(8 * math.sin(math.pi / 4) / 2, rel=1e-12)

    def test_fine_perimeter(self):
        s = mesh_stats(make_disk_mesh(1.0, 256, 32))
        assert abs(s.perimeter - 2 * math.pi) < 1e-3
        assert s.perimeter == pytest.approx(perimeter_of_inscribed_polygon(1.0, 256), rel=1e-12)

    def test_area_radius_two(self):
        s = mesh_stats(make_disk_mesh(2.0, 64, 8))
        assert s.area == pytest.approx(4 * math.pi, rel=0.01)
        assert s.area == pytest.approx(area_of_inscribed_polygon(2.0, 64), rel=1e-12)

    @pytest.mark.parametrize("nb,nr", [(8, 2), (48, 8), (256, 40)])
    def test_topology(self, nb, nr):
        m = make_disk_mesh(1.0, nb, nr)
        validate_mesh(m)
        assert euler_characteristic(m) == 1
        assert m.n_holes() == 0

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            make_disk_mesh(1.0, 4, 2)


class TestRect:
    def test_two_triangles(self):
        m = make_rect_mesh(1, 1, 1, 1)
        assert m.n_triangles == 2
        assert mesh_stats(m).area == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("w,h,nx,ny,area,perim", [(1, 1, 10, 10, 1.0, 4.0), (2, 0.5, 8, 2, 1.0, 5.0)])
    def test_exact(self, w, h, nx, ny, area, perim):
        s = validate_mesh(make_rect_mesh(w, h, nx, ny))
        assert s.area == pytest.approx(area, rel=1e-14)
        assert s.perimeter == pytest.approx(perim, rel=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 5), st.floats(0.1, 5), st.integers(1, 12), st.integers(1, 12))
    def test_area_property(self, w, h, nx, ny):
        aspect = (w / nx) / (h / ny)
        assume(0.5 <= aspect <= 2.0)  # skinnier cells break the 20 degree rule
        m = make_rect_mesh(w, h, nx, ny)
        s = mesh_stats(m)
        assert s.area == pytest.approx(w * h, rel=1e-12)
        assert s.perimeter == pytest.approx(2 * (w + h), rel=1e-12)
        assert euler_characteristic(m) == 1


class TestPerforated:
    def test_single_hole_area(self):
        s = validate_mesh(make_perforated_square_mesh(1, 0.1, 128))
        assert s.area == pytest.approx(1 - math.pi * 0.01, rel=0.005)

    def test_perimeter_n4(self):
        s = validate_mesh(make_perforated_square_mesh(4, 1.0, 128))
        assert s.perimeter == pytest.approx(4 + 2 * math.pi, rel=0.005)

    def test_oversized_holes(self):
        with pytest.raises(ValueError):
            make_perforated_square_mesh(2, 10.0, 32)

    def test_resolution_rules(self):
        with pytest.raises(ValueError):
            make_perforated_square_mesh(4, 1.0, 30)
        with pytest.raises(ValueError):
            make_perforated_square_mesh(4, 1.0, 4)

    @pytest.mark.parametrize("N,k", [(1, 0.2), (3, 1.0), (4, 1.0), (6, 0.5)])
    def test_topology_and_tags(self, N, k):
        m = make_perforated_square_mesh(N, k, 16)
        validate_mesh(m)
        assert m.n_holes() == N * N
        assert euler_characteristic(m) == 1 - N * N
        assert set(np.unique(m.boundary_tags)) == set(range(N * N + 1))

    def test_convergence_rate(self):
        N, k = 4, 1.0
        exact_area = 1 - N * N * math.pi * hole_radius(N, k, 2) ** 2
        exact_perim = 4 + 2 * math.pi * k
        errs = []
        for res in (16, 32, 64):
            s = mesh_stats(make_perforated_square_mesh(N, k, res))
            errs.append((abs(s.area - exact_area), abs(s.perimeter - exact_perim)))
        for (a0, p0), (a1, p1) in zip(errs, errs[1:]):
            assert 2 <= a0 / a1 <= 8
            assert 2 <= p0 / p1 <= 8


class TestTransforms:
    def test_scale_square(self):
        s = mesh_stats(scale_mesh(make_rect_mesh(1, 1, 4, 4), 2.0))
        assert s.area == pytest.approx(4.0, rel=1e-14)
        assert s.perimeter == pytest.approx(8.0, rel=1e-14)

    def test_scale_identity(self):
        m = make_disk_mesh(1.0, 32, 4)
        assert scale_mesh(m, 1.0).same_as(m)

    def test_scale_h(self):
        m = make_disk_mesh(1.0, 32, 4)
        assert mesh_stats(scale_mesh(m, 3.0)).h_max == pytest.approx(3 * mesh_stats(m).h_max, rel=1e-14)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.01, 100))
    def test_scale_area(self, t):
        m = make_disk_mesh(1.0, 24, 4)
        assert mesh_stats(scale_mesh(m, t)).area == pytest.approx(t * t * mesh_stats(m).area, rel=1e-12)

    def test_mesh_for_domain(self):
        assert mesh_stats(mesh_for_domain(Rectangle(2.0, 0.5), 16)).area == pytest.approx(1.0)
        with pytest.raises(TypeError):
            mesh_for_domain(DisjointUnion((Ball(1.0),)), 16)
        with pytest.raises(ValueError):
            mesh_for_domain(Ball(1.0, 3), 16)


class TestValidation:
    def test_inverted_triangle(self):
        m = Mesh([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]], [[0, 1], [1, 2], [2, 0]])
        with pytest.raises(DegenerateTriangleError):
            mesh_stats(m)

    def test_missing_boundary_edge(self):
        m = Mesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]], [[0, 1], [1, 2]])
        with pytest.raises(MeshError):
            validate_mesh(m)

    def test_duplicate_vertex(self):
        v = [[0, 0], [1, 0], [0, 1], [1, 0]]
        m = Mesh(v, [[0, 1, 2], [3, 1, 2]], [[0, 1], [1, 2], [2, 0]])
        with pytest.raises(MeshError):
            validate_mesh(m)

    def test_min_angle(self):
        with pytest.raises(MeshError, match="angle"):
            make_rect_mesh(10, 1, 1, 1)
        m = Mesh([[0, 0], [10, 0], [0, 1]], [[0, 1, 2]], [[0, 1], [1, 2], [2, 0]])
        with pytest.raises(MeshError, match="angle"):
            validate_mesh(m)

    def test_arrays_read_only(self):
        m = make_rect_mesh(1, 1, 2, 2)
        with pytest.raises(ValueError):
            m.vertices[0, 0] = 5.0


def test_mesh_file_round_trip(tmp_path):
    m = make_perforated_square_mesh(3, 0.5, 16)
    path = tmp_path / "cell.mesh"
    write_mesh(m, path)
    assert read_mesh(path).same_as(m)


def test_mesh_file_bad_header(tmp_path):
    path = tmp_path / "bad.mesh"
    path.write_text("points 3\n")
    with pytest.raises(MeshError):
        read_mesh(path)
