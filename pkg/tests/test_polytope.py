import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from klainval import Polytope, DegenerateFace, cross_polytope, cube, octahedron, segment, zonotope
from klainval.polytope import (
    ball_approximant,
    ball_volume,
    box,
    exterior_angle,
    hausdorff_distance,
    is_centrally_symmetric,
    has_centrally_symmetric_k_faces,
    minkowski_sum,
    normal_cone,
    project,
    support,
    symmetric_direction_grid,
)
from klainval.subspace import coordinate_subspace, sample_uniform

clouds = st.tuples(st.integers(2, 4), st.integers(0, 2**31)).map(
    lambda a: np.random.default_rng(a[1]).standard_normal((a[0] + 4 + a[1] % 7, a[0]))
)


@pytest.mark.parametrize(
    "P, counts",
    [
        (cube(3), (8, 12, 6)),
        (octahedron(), (6, 12, 8)),
        (cube(4), (16, 32, 24, 8)),
        (cross_polytope(4), (8, 24, 32, 16)),
    ],
)
def test_face_counts(P, counts):
    assert P.lattice().proper_counts() == counts


@settings(max_examples=30, deadline=None)
@given(clouds)
def test_euler_relation_and_hull_volume(X):
    P = Polytope(X)
    L = P.lattice()
    # the alternating sum over all nonempty faces (P included) equals 1
    assert L.euler_sum() == 1
    assert P.dim_volume() == pytest.approx(ConvexHull(X).volume, rel=1e-10)
    assert len(P.vertices) == len(ConvexHull(X).vertices)


@settings(max_examples=30, deadline=None)
@given(clouds)
def test_vertex_exterior_angles_sum_to_one(X):
    P = Polytope(X)
    total = sum(exterior_angle(P, F) for F in P.lattice().faces(0))
    tol = 1e-9 if P.n <= 3 else 0.02
    assert total == pytest.approx(1.0, abs=tol)


def test_lower_dimensional_polytope():
    sq = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert sq.dim == 2 and sq.dim_volume() == pytest.approx(1.0)
    assert sq.lattice().proper_counts() == (4, 4)
    s = segment([0, 0, 0], [0, 0, 2])
    assert s.dim == 1 and s.dim_volume() == pytest.approx(2.0)


def test_normal_cones_of_cube():
    C = cube(3)
    for F in C.lattice().faces(0):
        assert exterior_angle(C, F) == pytest.approx(1 / 8)
    for F in C.lattice().faces(1):
        assert exterior_angle(C, F) == pytest.approx(1 / 4)
        assert normal_cone(C, F).dim == 2
    with pytest.raises(DegenerateFace):
        exterior_angle(C, C.lattice().faces(3)[0])


def test_symmetry_predicates():
    assert is_centrally_symmetric(cube(3)) and is_centrally_symmetric(octahedron())
    tet = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert not is_centrally_symmetric(tet)
    ok, bad = has_centrally_symmetric_k_faces(octahedron(), 2)
    assert not ok and len(bad) == 8
    assert has_centrally_symmetric_k_faces(cube(3), 2)[0]


@settings(max_examples=25, deadline=None)
@given(clouds, st.integers(0, 2**31))
def test_support_is_additive_under_minkowski_sum(X, seed):
    gen = np.random.default_rng(seed)
    P = Polytope(X)
    Q = Polytope(gen.standard_normal((6, P.n)))
    S = minkowski_sum(P, Q)
    for u in gen.standard_normal((5, P.n)):
        assert support(S, u) == pytest.approx(support(P, u) + support(Q, u), abs=1e-10)


def test_projection_and_hausdorff():
    C = cube(3)
    assert project(C, coordinate_subspace(3, [0, 1])).dim_volume() == pytest.approx(1.0)
    assert hausdorff_distance(C, C.translate([0.3, 0, 0])) == pytest.approx(0.3)
    E = sample_uniform(3, 2, 0)
    assert project(C, E).n == 2


def test_constructors():
    Z = zonotope([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert Z.dim_volume() == pytest.approx(8.0)
    assert box([1, 2, 3]).dim_volume() == pytest.approx(6.0)
    G = symmetric_direction_grid(3, 240, seed=0)
    assert G.shape == (240, 3)
    assert np.allclose(G[:120], -G[120:])
    for n in (2, 3, 4):
        B = ball_approximant(n)
        assert is_centrally_symmetric(B)
        deficit = 1 - B.dim_volume() / ball_volume(n)
        assert 0 <= deficit < 0.02


def test_json_roundtrip():
    P = octahedron()
    Q = Polytope.from_json(P.to_json())
    assert np.array_equal(P.vertices, Q.vertices)
