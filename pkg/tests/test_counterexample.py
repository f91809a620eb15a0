import math

import numpy as np
import pytest

from klainval import (
    ConstantTerm,
    HIntegralTerm,
    IntrinsicTerm,
    KlainNotPositive,
    Polytope,
    StageFailure,
    ValuationSpec,
    build_counterexample,
    cube,
    evaluate,
    lempos_constants,
    minkowski_nondecomposition_check,
    octahedron,
)
from klainval.counterexample import (
    BODY_KINDS,
    intrinsic_of_ball,
    norm_upper_bound,
    point_evaluator,
    random_body,
    reverify,
    stress_positivity,
)
from klainval.polytope import ball_volume


@pytest.fixture(scope="module")
def small_report():
    return build_counterexample(n=3, grid_size=120, seed=3, stress_trials=600, samples=600)


def test_intrinsic_volumes_of_ball():
    assert intrinsic_of_ball(3, 1) == pytest.approx(4.0)
    assert intrinsic_of_ball(3, 2) == pytest.approx(2 * math.pi)
    assert intrinsic_of_ball(3, 3) == pytest.approx(ball_volume(3))


def test_point_evaluator_matches_evaluate():
    gen = np.random.default_rng(0)
    phi = ValuationSpec(
        3,
        [ConstantTerm(0.5, 3), HIntegralTerm.symmetrized(gen.standard_normal((3, 3)), [0.1, -0.05, 0.2]), IntrinsicTerm(2, 1.5, 3), IntrinsicTerm(1, 0.2, 3)],
    )
    f = point_evaluator(phi)
    for kind in BODY_KINDS:
        X = random_body(gen, 3, kind)
        assert f(X) == pytest.approx(evaluate(phi, Polytope(X)), rel=1e-9, abs=1e-12)


def test_norm_bound_dominates_values_in_the_ball():
    phi = ValuationSpec(3, [HIntegralTerm.symmetrized([[1.0, 0, 0], [0, 1.0, 0]], [0.3, -0.2]), IntrinsicTerm(1, 0.1, 3)])
    bound = norm_upper_bound(phi)
    gen = np.random.default_rng(1)
    for _ in range(200):
        X = random_body(gen, 3, BODY_KINDS[_ % 5])
        assert abs(point_evaluator(phi)(X)) <= bound


def test_lempos_rejects_nonpositive_klain():
    phi = ValuationSpec(3, [IntrinsicTerm(1, -1.0, 3)])
    with pytest.raises(KlainNotPositive):
        lempos_constants(phi, 0, norm_samples=10, eps_samples=10, pairs=10)


def test_small_counterexample(small_report):
    r = small_report
    assert r.components[1] < 0
    assert r.components[1] == pytest.approx(r.phi_at_witness, rel=1e-6)
    assert sum(r.components) == pytest.approx(r.psi_at_witness, rel=1e-12)
    assert r.stress.min_value >= 0
    assert r.constants.c1 == pytest.approx(r.constants.c0 / (math.pi * r.constants.eta**2))
    assert minkowski_nondecomposition_check(r)
    d = r.to_json()
    assert d["positivity"]["kind"] == "sampled positivity"
    assert d["positivity"]["trials"] == r.stress.trials


def test_reverify_with_fresh_seed(small_report):
    out = reverify(small_report, seed=99, trials=300)
    assert out["component1"] < 0 and out["min_value"] >= 0


def test_removing_the_constant_breaks_positivity(small_report):
    # on t K* the degree-1 part -|phi(K*)| t beats c_1 V_2(K*) t^2 once t is small
    psi = ValuationSpec(3, [t for t in small_report.psi.terms if not isinstance(t, ConstantTerm)])
    tiny = octahedron().scale(1e-8).vertices
    assert point_evaluator(psi)(tiny) < 0


def test_stage_failure_names_the_stage():
    with pytest.raises(StageFailure) as info:
        build_counterexample(n=3, body=cube(3, centered=True), stress_trials=10, samples=10)
    assert info.value.stage == "witness"


def test_nondecomposition_arithmetic():
    assert minkowski_nondecomposition_check(-1.0)
    assert not minkowski_nondecomposition_check(1.0)


def test_stress_covers_all_scales():
    phi = ValuationSpec(3, [ConstantTerm(1.0, 3)])
    res = stress_positivity(phi, 120, 0)
    assert set(res.by_scale) == {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}
    assert res.min_value == pytest.approx(1.0)
