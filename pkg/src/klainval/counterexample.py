"""A positive valuation whose degree-1 component is not positive.

Pipeline: a zonoid-separation witness for the octahedron gives an even
degree-1 valuation ``phi`` with positive Klain function but ``phi(K*) < 0``.
Constants ``c_0, c_1`` then make ``psi = c_0 + phi + c_1 V_2`` nonnegative, while
the degree-1 part of ``psi`` at ``K*`` is still ``phi(K*) < 0``.

Global positivity of ``psi`` rests on a modulus of continuity ``eta`` that is
estimated by sampling, so positivity is reported as sampled positivity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import EpsilonZero, KlainNotPositive, KlainvalError, StageFailure
from .membership import shift_to_strict, zonoid_witness
from .polytope import Polytope, ball_approximant, ball_volume, cross_polytope, symmetric_direction_grid
from .radii import inradius, min_enclosing_ball
from .subspace import RandomStream, RngLike, as_generator, as_stream, random_rotation, random_unit_vectors
from .valuations import (
    ConstantTerm,
    HIntegralTerm,
    IntrinsicTerm,
    ValuationSpec,
    _ridge_sum,
    evaluate,
    homogeneous_components,
    klain_function,
    mixed_volume,
)

STRESS_SCALES = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
BODY_KINDS = ("cloud", "segment", "thin", "flat", "cross")


# --- fast evaluation on point clouds ---------------------------------------------------------

def point_evaluator(phi: ValuationSpec) -> Callable[[np.ndarray], float]:
    """``X -> phi(conv X)`` without building a :class:`Polytope` for full-dimensional ``X``.

    Support-integral, constant and intrinsic-volume terms of index ``n``, ``n-1``
    and ``n-2`` are read off a single hull; anything else falls back to
    :func:`evaluate`.
    """
    n = phi.n
    fast = all(
        isinstance(t, (HIntegralTerm, ConstantTerm)) or (isinstance(t, IntrinsicTerm) and t.i in (0, n, n - 1, n - 2))
        for t in phi.terms
    )

    def f(X) -> float:
        X = np.asarray(X, dtype=float)
        if fast and len(X) > n:
            sv = np.linalg.svd(X - X.mean(axis=0), compute_uv=False)
            if sv[-1] > 1e-7 * max(1.0, sv[0]):
                try:
                    hull = ConvexHull(X)
                except QhullError:
                    hull = None
                if hull is not None:
                    total = 0.0
                    for t in phi.terms:
                        if isinstance(t, HIntegralTerm):
                            total += float(t.weights @ np.max(t.directions @ X.T, axis=1))
                        elif isinstance(t, ConstantTerm):
                            total += t.value_
                        elif t.i == 0:
                            total += t.coeff
                        elif t.i == n:
                            total += t.coeff * hull.volume
                        elif t.i == n - 1:
                            total += t.coeff * hull.area / 2.0
                        else:
                            total += t.coeff * _ridge_sum(X, hull)
                    return total
        return evaluate(phi, Polytope(X))

    return f


# --- random bodies ------------------------------------------------------------------------

def random_body(gen: np.random.Generator, n: int, kind: str) -> np.ndarray:
    """Vertex cloud of a random body of the given family, centred, with max vertex norm 1."""
    if kind == "segment":
        u = random_unit_vectors(gen, 1, n)[0]
        X = np.vstack([u, -u])
    elif kind == "cross":
        D = np.diag(gen.uniform(0.2, 1.0, n))
        X = np.vstack([D, -D]) @ random_rotation(n, gen).T
    else:
        k = int(gen.integers(n + 1, 4 * n + 1))
        X = gen.standard_normal((k, n))
        if kind == "thin":
            X[:, 1:] *= 10.0 ** gen.uniform(-3, -1)
        elif kind == "flat":
            X[:, -1] *= 10.0 ** gen.uniform(-3, -1)
        X = X @ random_rotation(n, gen).T
    X = X - X.mean(axis=0)
    return X / np.max(np.linalg.norm(X, axis=1))


# --- constants ------------------------------------------------------------------------------

def intrinsic_of_ball(n: int, i: int) -> float:
    return math.comb(n, i) * ball_volume(n) / ball_volume(n - i)


def norm_upper_bound(phi: ValuationSpec) -> float:
    """Term-wise bound on ``sup_{K in B^n} |phi(K)|``."""
    n = phi.n
    total = 0.0
    for t in phi.terms:
        if isinstance(t, HIntegralTerm):
            total += float(np.sum(np.abs(t.weights)))
        elif isinstance(t, IntrinsicTerm):
            total += abs(t.coeff) * intrinsic_of_ball(n, t.i)
        elif isinstance(t, ConstantTerm):
            total += abs(t.value_)
        else:
            # the ball approximant scaled to contain B^n dominates B^n by monotonicity
            B = ball_approximant(n)
            rho = 1.0 / inradius(B)[0]
            total += abs(t.coeff) * rho**t.degree * abs(mixed_volume([B] * t.degree + t.bodies))
    return total


@dataclass
class LemposConstants:
    c0: float
    c1: float
    epsilon: float
    eta: float
    norm_upper: float
    norm_sampled: float
    klain_min: float
    pairs: int
    eta_sweep: list = field(default_factory=list)


def _in_M(X: np.ndarray) -> bool:
    return bool(np.all(np.linalg.norm(X, axis=1) <= 1.0 + 1e-12)) and 2.0 * min_enclosing_ball(X)[0] >= 1.0


def lempos_constants(
    phi: ValuationSpec,
    rng: RngLike = None,
    *,
    norm_samples: int = 10_000,
    eps_samples: int = 10_000,
    pairs: int = 10_000,
    audit_size: int = 2400,
    max_k: int = 30,
) -> LemposConstants:
    """Constants ``c_0, c_1`` with ``c_0 + phi + c_1 V_2 >= 0`` (sampled certificate).

    ``c_0`` is a certified upper bound of the norm of ``phi``; ``epsilon`` the
    smallest sampled value of ``phi`` on segments of length at least 1 inside
    ``B^n``; ``eta`` the largest ``2^-k <= 1/16`` for which sampled pairs of bodies
    at Hausdorff distance below ``6 eta`` differ in value by less than
    ``epsilon``; and ``c_1 = c_0 / (pi eta^2)``.
    """
    n = phi.n
    if phi.degree != 1:
        raise KlainNotPositive("the construction needs a valuation homogeneous of degree 1")
    stream = as_stream(rng)
    s_norm, s_eps, s_pairs = [s.generator() for s in stream.split(3)]
    U = symmetric_direction_grid(n, audit_size, seed=stream.seed)
    kmin = float(np.min(klain_function(phi).values(U[:, None, :])))
    if not kmin > 0:
        raise KlainNotPositive(f"Klain function reaches {kmin:.3g} on the audit grid")
    f = point_evaluator(phi)

    norm_upper = norm_upper_bound(phi)
    norm_sampled = 0.0
    for j in range(norm_samples):
        X = random_body(s_norm, n, BODY_KINDS[j % len(BODY_KINDS)]) * s_norm.uniform(0.0, 1.0) ** (1.0 / n)
        norm_sampled = max(norm_sampled, abs(f(X)))

    eps = math.inf
    for _ in range(eps_samples):
        u = random_unit_vectors(s_eps, 1, n)[0]
        length = s_eps.uniform(1.0, 2.0)
        mid = random_unit_vectors(s_eps, 1, n)[0] * s_eps.uniform(0.0, 1.0 - length / 2)
        eps = min(eps, f(np.vstack([mid + 0.5 * length * u, mid - 0.5 * length * u])))
    if not eps > 0:
        raise EpsilonZero(f"valuation vanishes on a sampled segment (min {eps:.3g})")

    # bodies in M; pairs are formed by moving every vertex less than 6 eta
    base, values = [], []
    while len(base) < pairs:
        X = random_body(s_pairs, n, BODY_KINDS[len(base) % len(BODY_KINDS)]) * s_pairs.uniform(0.5, 1.0)
        if _in_M(X):
            base.append(X)
            values.append(f(X))
    dirs = [random_unit_vectors(s_pairs, len(X), n) for X in base]
    sweep = []
    eta = None
    for k in range(4, max_k + 1):
        e = 2.0**-k
        worst, tested = 0.0, 0
        for X, v, D in zip(base, values, dirs):
            Y = X + 6 * e * (1 - 1e-9) * D
            if not _in_M(Y):
                continue
            tested += 1
            worst = max(worst, abs(f(Y) - v))
            if worst >= eps:
                break
        sweep.append({"eta": e, "max_diff": worst, "tested": tested, "passed": worst < eps})
        if worst < eps:
            eta = e
            break
    if eta is None:
        raise EpsilonZero("no admissible eta found in the sweep")
    c0 = norm_upper
    return LemposConstants(c0, c0 / (math.pi * eta**2), eps, eta, norm_upper, norm_sampled, kmin, pairs, sweep)


# --- the counterexample -------------------------------------------------------------------------

@dataclass
class StressResult:
    trials: int
    min_value: float
    min_kind: str
    min_scale: float
    by_scale: dict


def stress_positivity(psi: ValuationSpec, trials: int = 10_000, rng: RngLike = None, extra: Optional[list] = None) -> StressResult:
    """Minimum of ``psi`` over random bodies of several families at scales 1/4..8."""
    gen = as_generator(rng)
    f = point_evaluator(psi)
    best = (math.inf, "", 0.0)
    by_scale = {t: math.inf for t in STRESS_SCALES}
    bodies = []
    for X in extra or []:
        bodies.extend((X * t, "given", t) for t in STRESS_SCALES)
    for j in range(trials - len(bodies)):
        kind = BODY_KINDS[j % len(BODY_KINDS)]
        t = STRESS_SCALES[(j // len(BODY_KINDS)) % len(STRESS_SCALES)]
        bodies.append((random_body(gen, psi.n, kind) * t, kind, t))
    for X, kind, t in bodies:
        v = f(X)
        by_scale[t] = min(by_scale[t], v)
        if v < best[0]:
            best = (v, kind, t)
    return StressResult(len(bodies), best[0], best[1], best[2], by_scale)


@dataclass
class CounterexampleReport:
    n: int
    psi: ValuationSpec
    phi: ValuationSpec
    witness_body: Polytope
    components: list
    component_residual: float
    psi_at_witness: float
    phi_at_witness: float
    constants: LemposConstants
    stress: StressResult
    klain_audit: float
    witness_objective: float
    shift: float
    seed: int
    grid_size: int

    @property
    def positivity_trials(self) -> int:
        return self.stress.trials

    @property
    def min_observed(self) -> float:
        return self.stress.min_value

    def to_json(self) -> dict:
        from .io import spec_to_json

        c = self.constants
        return {
            "n": self.n,
            "seed": self.seed,
            "grid_size": self.grid_size,
            "psi": spec_to_json(self.psi),
            "phi": spec_to_json(self.phi),
            "witness_body": self.witness_body.to_json(),
            "witness_objective": self.witness_objective,
            "shift_t": self.shift,
            "klain_audit_min": self.klain_audit,
            "components": list(self.components),
            "component_residual": self.component_residual,
            "psi_at_witness": self.psi_at_witness,
            "phi_at_witness": self.phi_at_witness,
            "constants": {
                "c0": c.c0,
                "c1": c.c1,
                "epsilon": c.epsilon,
                "eta": c.eta,
                "norm_upper": c.norm_upper,
                "norm_sampled": c.norm_sampled,
                "klain_min": c.klain_min,
                "pairs": c.pairs,
                "eta_sweep": c.eta_sweep,
            },
            "positivity": {
                "kind": "sampled positivity",
                "trials": self.stress.trials,
                "min_value": self.stress.min_value,
                "min_kind": self.stress.min_kind,
                "min_scale": self.stress.min_scale,
                "min_by_scale": {str(k): v for k, v in self.stress.by_scale.items()},
            },
        }


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except KlainvalError as exc:
        raise StageFailure(name, exc) from exc


def build_counterexample(
    n: int = 3,
    grid_size: int = 240,
    seed: int = 7,
    *,
    body: Optional[Polytope] = None,
    stress_trials: int = 10_000,
    samples: int = 10_000,
) -> CounterexampleReport:
    """Assemble ``psi = c_0 + phi + c_1 V_2`` and verify its advertised properties."""
    if n < 3:
        raise ValueError("the construction needs n >= 3")
    K = cross_polytope(n) if body is None else body
    stream = RandomStream(seed)
    s_wit, s_const, s_stress = stream.split(3)
    witness = _stage("witness", zonoid_witness, K, grid_size, seed)
    shifted = _stage("shift", shift_to_strict, witness, K)
    phi = shifted.spec
    consts = _stage(
        "constants", lempos_constants, phi, s_const, norm_samples=samples, eps_samples=samples, pairs=samples
    )
    psi = ValuationSpec(n, [ConstantTerm(consts.c0, n)] + list(phi.terms) + [IntrinsicTerm(2, consts.c1, n)])
    comps = _stage("decomposition", homogeneous_components, psi, K)
    stress = _stage("stress", stress_positivity, psi, stress_trials, s_stress, extra=[K.vertices - K.origin])
    return CounterexampleReport(
        n=n,
        psi=psi,
        phi=phi,
        witness_body=K,
        components=comps.values,
        component_residual=comps.residual,
        psi_at_witness=evaluate(psi, K),
        phi_at_witness=evaluate(phi, K),
        constants=consts,
        stress=stress,
        klain_audit=shifted.audit_min_shifted,
        witness_objective=witness.objective,
        shift=shifted.t,
        seed=seed,
        grid_size=grid_size,
    )


def reverify(report: CounterexampleReport, seed: int, trials: int = 10_000) -> dict:
    """Independent pass with a fresh seed: decomposition and sampled positivity again."""
    comps = homogeneous_components(report.psi, report.witness_body)
    stress = stress_positivity(report.psi, trials, RandomStream(seed))
    return {
        "component1": comps.values[1],
        "component_sum": float(sum(comps.values)),
        "psi_at_witness": evaluate(report.psi, report.witness_body),
        "min_value": stress.min_value,
        "trials": stress.trials,
    }


def minkowski_nondecomposition_check(c) -> bool:
    """Whether ``x -> c|x|`` fails subadditivity at ``e_1, e_2`` (so is no support function).

    ``c`` is a number or a :class:`CounterexampleReport` (its degree-1 component).
    """
    if isinstance(c, CounterexampleReport):
        c = c.components[1]
    return c * math.sqrt(2.0) > 2.0 * c
