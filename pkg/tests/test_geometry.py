import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mconvex.errors import NoInteriorZero
from mconvex.geometry import (
    Box,
    Disc,
    Polytope,
    Sampled,
    body_contains_point,
    body_support,
    box_vertices,
    clip_by_halfplanes,
    essential_range_hull,
    extreme_points,
    hull_distance,
    hull_membership_gap,
    is_simplex,
    jnr_sandwich,
    polytope_facets_2d,
    require_interior_zero,
    scale_body,
    support_value,
)
from mconvex.linalg import OperatorTuple, direct_sum, herm_part, skew_part

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)

SQUARE = Polytope(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))
TRIANGLE = Polytope(np.array([[2.0, 0.0], [-1.0, 1.5], [-1.0, -1.5]]))


def test_support_value_pauli():
    t = OperatorTuple((X, Z), hermitian=True)
    # sX + tZ has top eigenvalue sqrt(s^2 + t^2)
    assert support_value(t, [1.0, 0.0]) == pytest.approx(1.0)
    assert support_value(t, [1.0, 1.0]) == pytest.approx(np.sqrt(2.0))


def test_body_support_square_box_disc():
    c = np.array([0.6, 0.8])
    assert body_support(SQUARE, c) == pytest.approx(1.4)
    assert body_support(Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0])), c) == pytest.approx(1.4)
    assert body_support(Disc(np.zeros(2), 2.0), c) == pytest.approx(2.0)


def test_jnr_sandwich_nesting_and_shrinking():
    t = OperatorTuple((X, Z), hermitian=True)
    bounds = []
    for m in (16, 32, 64, 128):
        sw = jnr_sandwich(t, m=m)
        bounds.append(sw.hausdorff_bound)
        # every inner vertex lies inside the outer polygon
        normals, offsets = polytope_facets_2d(sw.outer)
        assert (sw.inner.vertices @ normals.T - offsets[None, :]).max() <= 1e-9
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    # W_1 of the Pauli pair is the unit disc
    sw = jnr_sandwich(t, m=64)
    radii = np.linalg.norm(sw.inner.vertices, axis=1)
    np.testing.assert_allclose(radii, 1.0, atol=1e-9)


def test_jnr_direct_sum_hull():
    t1 = OperatorTuple((X / 2, Z / 2), hermitian=True)
    t2 = OperatorTuple((X, Z), hermitian=True)
    sw = jnr_sandwich(direct_sum(t1, t2), m=64)
    target = jnr_sandwich(t2, m=64)
    assert abs(sw.outer.vertices.max() - target.outer.vertices.max()) < 1e-9


def test_extreme_points_drops_interior():
    pts = np.vstack([SQUARE.vertices, [[0.0, 0.0], [0.5, 0.5]]])
    ext = extreme_points(pts)
    assert sorted(map(tuple, ext.tolist())) == sorted(map(tuple, SQUARE.vertices.tolist()))


def test_hull_distance_and_membership_gap():
    assert hull_distance(SQUARE.vertices, np.array([0.25, -0.5])) <= 1e-9
    assert hull_distance(SQUARE.vertices, np.array([2.0, 0.0])) == pytest.approx(1.0, abs=1e-6)
    assert hull_membership_gap(SQUARE.vertices, np.array([0.25, -0.5])) <= 1e-9
    assert hull_membership_gap(SQUARE.vertices, np.array([1.5, 0.0])) > 0.2


def test_is_simplex_examples():
    flag, _ = is_simplex(TRIANGLE.vertices)
    assert flag
    flag, _ = is_simplex(SQUARE.vertices)
    assert not flag
    tetra = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    flag, _ = is_simplex(tetra)
    assert flag


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_is_simplex_affine_invariant(seed):
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((2, 2))
    while abs(np.linalg.det(mat)) < 0.1:
        mat = rng.standard_normal((2, 2))
    shift = rng.standard_normal(2)
    for pts, expect in ((TRIANGLE.vertices, True), (SQUARE.vertices, False)):
        moved = pts @ mat.T + shift
        flag, _ = is_simplex(moved)
        assert flag is expect


def test_essential_range_hull_cases():
    theta = np.linspace(0.0, 2 * np.pi, 361)[:-1]
    hull, ext = essential_range_hull(np.exp(1j * theta))
    assert hull.shape[0] == 360 and ext.shape[0] == 360
    hull, ext = essential_range_hull([2.0 + 0.0j])
    assert hull.shape[0] == 1
    hull, ext = essential_range_hull([0.0, 1.0, 0.5, 0.25])
    assert sorted(ext[:, 0].tolist()) == [0.0, 1.0]


def test_polytope_facets_triangle():
    normals, offsets = polytope_facets_2d(TRIANGLE)
    assert normals.shape == (3, 2)
    # every vertex satisfies all facet inequalities with equality on two
    vals = TRIANGLE.vertices @ normals.T - offsets[None, :]
    assert vals.max() <= 1e-12
    assert ((np.abs(vals) < 1e-9).sum(axis=1) == 2).all()


def test_clip_by_halfplanes_square():
    normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    verts = clip_by_halfplanes(normals, np.ones(4), radius=10.0)
    assert sorted(map(tuple, np.round(verts, 9).tolist())) == sorted(
        map(tuple, SQUARE.vertices.tolist())
    )


def test_scale_body_about_center():
    scaled = scale_body(SQUARE, 2.0)
    assert body_support(scaled, np.array([1.0, 0.0])) == pytest.approx(2.0)
    disc = scale_body(Disc(np.array([1.0, 0.0]), 1.0), 3.0, center=np.array([1.0, 0.0]))
    assert disc.radius == pytest.approx(3.0)
    assert disc.center[0] == pytest.approx(1.0)


def test_box_vertices_count():
    box = Box(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 1.0, 3.0]))
    verts = box_vertices(box)
    assert verts.shape == (8, 3)
    assert body_contains_point(box, verts[0])


def test_require_interior_zero():
    assert require_interior_zero(SQUARE) == pytest.approx(1.0)
    shifted = Polytope(SQUARE.vertices + np.array([5.0, 5.0]))
    with pytest.raises(NoInteriorZero):
        require_interior_zero(shifted)


def test_sampled_body_support():
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    body = Sampled(dirs, np.ones(4))
    assert body_support(body, np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_nilpotent_range_is_disc():
    s = np.array([[0.0, 2.0], [0.0, 0.0]], dtype=complex)
    t = OperatorTuple((herm_part(s), skew_part(s)), hermitian=True)
    sw = jnr_sandwich(t, m=64)
    radii = np.linalg.norm(sw.inner.vertices, axis=1)
    np.testing.assert_allclose(radii, 1.0, atol=1e-9)
