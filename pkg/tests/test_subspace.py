import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klainval import RankDeficient, RandomStream
from klainval.subspace import (
    Subspace,
    as_generator,
    cos_angle,
    coordinate_subspace,
    line,
    orthonormalize,
    perp,
    random_rotation,
    rotate,
    sample_incident,
    sample_uniform,
    sample_uniform_batch,
)

dims = st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1), st.integers(0, 2**31)))


@settings(max_examples=40, deadline=None)
@given(dims)
def test_sampled_frames_are_orthonormal(args):
    n, i, seed = args
    E = sample_uniform(n, i, seed)
    assert np.allclose(E.frame @ E.frame.T, np.eye(i), atol=1e-12)
    P = E.projector
    assert np.allclose(P @ P, P, atol=1e-12)
    assert math.isclose(np.trace(P), i, abs_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(dims)
def test_cos_angle_properties(args):
    n, i, seed = args
    gen = as_generator(seed)
    E, F = sample_uniform(n, i, gen), sample_uniform(n, i, gen)
    c = cos_angle(E, F)
    assert -1e-12 <= c <= 1 + 1e-12
    assert math.isclose(c, cos_angle(F, E), abs_tol=1e-12)
    assert math.isclose(cos_angle(E, E), 1.0, abs_tol=1e-12)
    # the cosine is invariant under passing to orthogonal complements
    assert math.isclose(c, cos_angle(perp(E), perp(F)), abs_tol=1e-10)
    Q = random_rotation(n, gen)
    assert math.isclose(c, cos_angle(rotate(E, Q), rotate(F, Q)), abs_tol=1e-10)


@settings(max_examples=40, deadline=None)
@given(dims)
def test_perp_is_complement(args):
    n, i, seed = args
    E = sample_uniform(n, i, seed)
    Ep = perp(E)
    assert Ep.dim == n - i
    assert np.allclose(E.frame @ Ep.frame.T, 0, atol=1e-12)
    assert perp(Ep).same_as(E)


def test_incident_subspaces():
    gen = np.random.default_rng(0)
    F = sample_uniform(5, 2, gen)
    big = sample_incident(F, 4, gen)
    assert all(big.contains(v) for v in F.frame)
    small = sample_incident(F, 1, gen)
    assert F.contains(small.frame[0])
    assert sample_incident(F, 2, gen).same_as(F)


def test_orthonormalize_rejects_dependent_vectors():
    with pytest.raises(RankDeficient):
        orthonormalize([[1, 0, 0], [2, 0, 0]])
    assert orthonormalize([[1, 1, 0], [1, 0, 0]]).dim == 2


def test_stream_reproducibility_and_independence():
    a = RandomStream(3).generator().standard_normal(5)
    b = RandomStream(3).generator().standard_normal(5)
    assert np.array_equal(a, b)
    s1, s2 = RandomStream(3).split(2)
    assert not np.array_equal(s1.generator().standard_normal(5), s2.generator().standard_normal(5))


def test_uniform_line_distribution_is_isotropic():
    # E|u_1|^2 = 1/n for uniform lines
    U = sample_uniform_batch(4, 1, 40_000, RandomStream(1))[:, 0, :]
    assert np.allclose(np.mean(U**2, axis=0), 0.25, atol=0.01)


def test_coordinate_subspace_and_json():
    E = coordinate_subspace(4, [0, 2])
    assert E.contains([1, 0, 1, 0]) and not E.contains([0, 1, 0, 0])
    assert Subspace.from_json(E.to_json()).same_as(E)
    assert line([0, 0, 2]).same_as(coordinate_subspace(3, [2]))
