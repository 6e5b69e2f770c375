import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfdim.errors import OutOfDomain
from cfdim.mesh import Region, bilinear_weights, build_mesh_domain, locate_square


def brute_force_squares(n, region):
    # independent oracle: dense sampling of each square against the open region
    c = 0.5
    out = []
    kmin = 0 if region is Region.HALF_DISK else -n // 2
    t = np.linspace(0, 1, 81)
    X, Y = np.meshgrid(t, t)
    for j in range(n):
        for k in range(kmin, n // 2):
            x = (j + X) / n
            y = (k + Y) / n
            inside = (x - c) ** 2 + y**2 < 0.25
            if region is Region.HALF_DISK:
                inside &= y > 0
            if inside.any():
                out.append((j, k))
    return out


def test_n2_half_disk_example():
    m = build_mesh_domain(2, Region.HALF_DISK)
    assert m.squares.tolist() == [[0, 0], [1, 0]]
    assert m.points.tolist() == [[0, 0], [0, 0.5], [0.5, 0], [0.5, 0.5], [1, 0], [1, 0.5]]
    assert m.origin_index == 0
    assert m.h == 0.5


@pytest.mark.parametrize("n", [0, -2, 3, 51])
def test_rejects_bad_n(n):
    with pytest.raises(ValueError):
        build_mesh_domain(n)


def test_point_count_near_published_dof():
    # 1098 in the published table; the exact rule omits two squares that only touch the circle
    m = build_mesh_domain(50)
    assert m.n_points == 1096
    assert abs(m.n_points - 1098) / 1098 < 0.05


@pytest.mark.parametrize("n", [4, 6, 10, 16])
@pytest.mark.parametrize("region", [Region.HALF_DISK, Region.FULL_DISK])
def test_inclusion_matches_sampling_oracle(n, region):
    m = build_mesh_domain(n, region)
    assert sorted(map(tuple, m.squares.tolist())) == sorted(brute_force_squares(n, region))


@pytest.mark.parametrize("n", [8, 50])
def test_points_strictly_increasing_and_covering(n):
    m = build_mesh_domain(n)
    pts = [tuple(p) for p in m.points.tolist()]
    assert all(a < b for a, b in zip(pts, pts[1:]))
    # every point of the closed half disk is locatable
    rng = np.random.default_rng(1)
    r = np.sqrt(rng.uniform(0, 1, 5000)) * 0.5
    th = rng.uniform(0, np.pi, 5000)
    x, y = 0.5 + r * np.cos(th), r * np.sin(th)
    j, k, xi, eta = m.locate(x, y)
    assert ((xi >= 0) & (xi <= 1) & (eta >= 0) & (eta <= 1)).all()
    assert np.allclose(j / n + xi / n, x) and np.allclose(k / n + eta / n, y)


def test_full_disk_symmetric():
    m = build_mesh_domain(10, Region.FULL_DISK)
    pts = {tuple(p) for p in m.points.tolist()}
    assert pts == {(x, -y) for x, y in pts}
    assert m.points[m.origin_index].tolist() == [0, 0]


def test_deterministic_rebuild():
    a, b = build_mesh_domain(20), build_mesh_domain(20)
    assert np.array_equal(a.points, b.points)


def test_index_of():
    m = build_mesh_domain(2)
    assert m.index_of((1.0, 0.5)) == 5
    with pytest.raises(KeyError):
        m.index_of((0.25, 0.0))


@pytest.mark.parametrize(
    "p, expected",
    [((0.25, 0.25), (0, 0)), ((0.5, 0.0), (1, 0)), ((1.0, 0.5), (1, 0))],
)
def test_locate_examples(p, expected):
    assert locate_square(build_mesh_domain(2), p) == expected


def test_locate_out_of_domain():
    m = build_mesh_domain(10)
    with pytest.raises(OutOfDomain):
        locate_square(m, (0.95, 0.45))
    with pytest.raises(OutOfDomain):
        locate_square(m, (1.3, 0.0))


def test_locate_absorbs_rounding_at_the_rim():
    m = build_mesh_domain(100)
    # (0.64, 0.48) lies on the circle at a lattice point; a hair outside still resolves
    j, k = locate_square(m, (0.64 + 1e-13, 0.48 + 1e-13))
    assert m.has_square(j, k)


def test_stencil_example():
    sw = bilinear_weights(build_mesh_domain(2), (0.125, 0.0))
    assert sw.corners == (0, 1, 2, 3)
    assert sw.weights == pytest.approx((0.75, 0.0, 0.25, 0.0))
    assert sw.bracket == pytest.approx(0.046875)


def test_stencil_corner_and_center():
    m = build_mesh_domain(10)
    sw = bilinear_weights(m, (0.3, 0.1))
    assert sw.weights == (1.0, 0.0, 0.0, 0.0) and sw.bracket == 0.0
    sw = bilinear_weights(m, (0.35, 0.15))
    assert sw.weights == pytest.approx((0.25,) * 4)
    assert sw.bracket == pytest.approx(m.h**2 / 2)


@settings(max_examples=1000, deadline=None)
@given(
    st.floats(0.05, 0.95),
    st.floats(0.0, 0.2),
    st.tuples(*[st.floats(-3, 3)] * 4),
)
def test_stencil_reproduces_bilinear_functions(x, y, coef):
    m = build_mesh_domain(16)
    a, b, c, d = coef
    g = lambda p: a + b * p[0] + c * p[1] + d * p[0] * p[1]
    sw = bilinear_weights(m, (x, y))
    pts = m.points
    approx = sum(w * g(pts[i]) for i, w in zip(sw.corners, sw.weights))
    assert approx == pytest.approx(g((x, y)), abs=1e-12)
    assert sum(sw.weights) == pytest.approx(1.0)
    assert all(0 <= w <= 1 for w in sw.weights)
    assert 0 <= sw.bracket <= m.h**2 / 2 + 1e-18


def test_bracket_on_edges_keeps_only_the_transverse_term():
    m = build_mesh_domain(8)
    for y in (0.01, 0.0625, 0.1):
        eta = y * 8 - np.floor(y * 8)
        # on a vertical grid line only the y factor survives
        assert bilinear_weights(m, (0.25, y)).bracket == pytest.approx((1 - eta) * eta / 64, abs=1e-18)
    assert bilinear_weights(m, (0.25, 0.125)).bracket == 0.0


def test_bracket_zero_at_vertices_and_max_at_center():
    m = build_mesh_domain(8)
    xs = np.linspace(0.25, 0.375, 41)
    vals = [bilinear_weights(m, (x, 0.125)).bracket for x in xs]
    assert vals[0] == 0.0 and vals[-1] == 0.0
    centre = bilinear_weights(m, (0.3125, 0.1875)).bracket
    assert centre == pytest.approx(m.h**2 / 2)
    assert max(vals) <= centre


def test_higher_order_node_counts():
    # published DOF for the tensor Lagrange spaces
    assert build_mesh_domain(24).nodes(2).size == 1041
    assert build_mesh_domain(16).nodes(3).size == 1081
    assert build_mesh_domain(32).nodes(3).size == 3997
    assert build_mesh_domain(24).nodes(4).size == 4017
    assert build_mesh_domain(50).nodes(1).size == build_mesh_domain(50).n_points
