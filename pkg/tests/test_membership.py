import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klainval import (
    BadDimension,
    NoWitnessFound,
    NotCentrallySymmetric,
    Polytope,
    RandomStream,
    cross_polytope,
    cube,
    decide_G,
    evaluate,
    octahedron,
    representing_measure,
    shift_to_strict,
    zonoid_witness,
    zonotope,
)
from klainval.membership import audit_directions, edge_directions, face_classes
from klainval.subspace import cos_angle, sample_uniform
from klainval.valuations import projection_volume


def test_cube_measure_is_coordinate_atoms():
    mu = representing_measure(cube(3), 1)
    assert len(mu) == 3 and np.allclose(mu.weights, 1.0)
    mu2 = representing_measure(cube(3), 2)
    assert len(mu2) == 3 and np.allclose(mu2.weights, 1.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(3, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(n, n + 3), st.integers(0, 2**31))))
def test_random_zonotopes_are_members(args):
    n, m, seed = args
    gen = np.random.default_rng(seed)
    Z = zonotope(gen.standard_normal((m, n)))
    for i in range(1, n):
        cert = decide_G(Z, i, RandomStream(seed), trials=20)
        assert cert.member
        assert cert.residuals["projection"] < 1e-6 * max(1.0, Z.dim_volume())
        E = sample_uniform(n, i, gen)
        rhs = sum(w * cos_angle(E, F) for F, w in cert.measure.atoms)
        assert projection_volume(Z, E) == pytest.approx(rhs, rel=1e-8)


def test_zonotope_atoms_match_generator_formula():
    # for a zonotope with generators g_k the 1-atoms are the lines g_k, weight 2|g_k|
    G = np.array([[1.0, 0, 0], [0, 2.0, 0], [1.0, 1.0, 1.0]])
    mu = representing_measure(zonotope(G), 1)
    assert sorted(mu.weights) == pytest.approx(sorted(2 * np.linalg.norm(G, axis=1)))


def test_non_members_name_faces():
    cert = decide_G(octahedron(), 1, RandomStream(0))
    assert cert.verdict == "non-member" and len(cert.violating_faces) == 8
    assert all(k == 2 for k, _ in cert.violating_faces)
    cert = decide_G(cross_polytope(4), 2, RandomStream(0))
    assert not cert.member and len(cert.violating_faces) == 16
    assert decide_G(cross_polytope(4), 1, RandomStream(0)).verdict == "non-member"


def test_top_index_always_member():
    for P in (octahedron(), cross_polytope(4)):
        cert = decide_G(P, P.n - 1, RandomStream(0), trials=30)
        assert cert.member and cert.residuals["projection"] < 1e-9


def test_input_validation():
    tet = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(NotCentrallySymmetric):
        decide_G(tet, 1)
    with pytest.raises(BadDimension):
        decide_G(cube(3), 3)
    with pytest.raises(BadDimension):
        zonoid_witness(cube(2, centered=True))


def test_certificate_json():
    d = decide_G(cube(3), 1, RandomStream(0), trials=10).to_json()
    assert d["verdict"] == "member" and len(d["measure"]["atoms"]) == 3


def test_face_classes_of_cube():
    classes = face_classes(cube(3), 1)
    assert len(classes) == 3 and all(len(fs) == 4 for _, fs in classes)
    assert len(edge_directions(octahedron())) == 6


def test_octahedron_witness_properties():
    O = octahedron()
    w = zonoid_witness(O, 240, 0)
    assert w.objective < -1e-6
    assert w.min_cosine >= -1e-12
    # the objective is the valuation evaluated at the body, and the shift adds t V_1
    assert evaluate(w.spec(), O) == pytest.approx(w.objective, rel=1e-12)
    from klainval import intrinsic_volume

    s0 = shift_to_strict(w, O)
    assert s0.value_at_K == pytest.approx(w.objective + s0.t * intrinsic_volume(O, 1), rel=1e-12)
    s = shift_to_strict(w, O)
    assert s.audit_min_shifted > 0 and s.value_at_K < 0
    U = audit_directions(O, 240)
    assert len(U) == s.audit_size


def test_witness_is_deterministic():
    a = zonoid_witness(octahedron(), 120, 5)
    b = zonoid_witness(octahedron(), 120, 5)
    assert a.objective == b.objective and np.array_equal(a.weights, b.weights)


@pytest.mark.parametrize("P", [cube(3, centered=True), zonotope([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])])
def test_zonotopes_have_no_witness(P):
    with pytest.raises(NoWitnessFound):
        zonoid_witness(P, 240, 0)
