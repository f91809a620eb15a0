"""Polytopal membership in the classes G(i) and K(i), and zonoid-separation witnesses.

A centrally symmetric polytope is a member for index ``i`` exactly when all of
its ``(i+1)``-faces are centrally symmetric.  Members get an explicit atomic
measure ``mu`` on ``G_i`` with ``vol_i(P|E) = sum_k w_k cos(E, E_k)``.  For
``i = 1`` non-membership is also witnessed by a linear program producing an even
signed measure ``rho`` on the sphere with nonnegative cosine transform and
``int h_K drho < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BadDimension,
    ClassVolumeMismatch,
    NoWitnessFound,
    NotCentrallySymmetric,
    ShiftImpossible,
    TilingFailure,
)
from .polytope import (
    Polytope,
    exterior_angle,
    face_volume,
    has_centrally_symmetric_k_faces,
    is_centrally_symmetric,
    support_batch,
    symmetric_direction_grid,
)
from .simplex import linprog_simplex
from .subspace import RandomStream, RngLike, Subspace, as_generator, cos_angle, projector_distance, sample_uniform
from .transforms import AtomicGrassMeasure
from .valuations import (
    HIntegralTerm,
    IntrinsicTerm,
    MixedVolumeTerm,
    ValuationSpec,
    evaluate,
    intrinsic_volume,
    klain,
    projection_volume,
)

CLASS_TOL = 1e-9
WITNESS_TOL = 1e-6


@dataclass
class MembershipCertificate:
    verdict: str
    n: int
    i: int
    violating_faces: list = field(default_factory=list)
    measure: Optional[AtomicGrassMeasure] = None
    residuals: dict = field(default_factory=dict)

    @property
    def member(self) -> bool:
        return self.verdict == "member"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "n": self.n,
            "i": self.i,
            "violating_faces": [list(f) for f in self.violating_faces],
            "measure": None if self.measure is None else self.measure.to_json(),
            "residuals": dict(self.residuals),
        }


def _check_symmetric(P: Polytope) -> None:
    if not is_centrally_symmetric(P):
        raise NotCentrallySymmetric("polytope is not centrally symmetric")


def decide_G(P: Polytope, i: int, rng: RngLike = None, trials: int = 100) -> MembershipCertificate:
    """Membership verdict for index ``i``; members come with a verified representing measure."""
    _check_symmetric(P)
    n = P.n
    if not 0 < i < n:
        raise BadDimension(f"need 0 < i < n, got i={i}, n={n}")
    if i + 1 <= P.dim and i != n - 1:
        ok, bad = has_centrally_symmetric_k_faces(P, i + 1)
        if not ok:
            return MembershipCertificate("non-member", n, i, violating_faces=[(i + 1, j) for j in bad])
    mu = representing_measure(P, i, rng)
    report = verify_integral_rep(P, i, mu, trials=trials, rng=rng)
    return MembershipCertificate("member", n, i, measure=mu, residuals=report)


def face_classes(P: Polytope, i: int) -> list:
    """``i``-faces grouped by their direction space (lists of faces)."""
    classes = []
    for F in P.lattice().faces(i):
        S = Subspace(F.affine_basis, check=False)
        for rep, members in classes:
            if projector_distance(rep, S) < CLASS_TOL:
                members.append(F)
                break
        else:
            classes.append((S, [F]))
    return classes


def representing_measure(P: Polytope, i: int, rng: RngLike = None) -> AtomicGrassMeasure:
    """Atoms at the direction spaces of parallel classes of ``i``-faces, weighted by face volume."""
    if i > P.dim:
        return AtomicGrassMeasure([])
    if i == P.dim:
        return AtomicGrassMeasure([(Subspace(P.basis, check=False), P.dim_volume())])
    atoms = []
    for S, faces in face_classes(P, i):
        vols = np.array([face_volume(P, F) for F in faces])
        scale = max(1.0, float(vols.max()))
        if vols.max() - vols.min() > CLASS_TOL * scale:
            raise ClassVolumeMismatch(f"parallel {i}-faces with volumes {vols.min():.12g} and {vols.max():.12g}")
        # the normal cones of a class must cover the whole complementary subspace
        cover = sum(exterior_angle(P, F, rng) for F in faces)
        exact = P.dim - i <= 3
        if abs(cover - 1.0) > (1e-9 if exact else 5e-3):
            raise TilingFailure(f"normal cones of a face class cover {cover:.6g} of their span")
        atoms.append((S, float(vols.mean())))
    return AtomicGrassMeasure(atoms)


def _random_spec(P: Polytope, i: int, gen) -> ValuationSpec:
    n = P.n
    L = Polytope(gen.standard_normal((n + 3, n)))
    return ValuationSpec(n, [MixedVolumeTerm(i, [L] * (n - i), float(gen.uniform(0.5, 2.0)))])


def verify_integral_rep(P: Polytope, i: int, mu: AtomicGrassMeasure, trials: int = 100, rng: RngLike = None, specs: int = 5) -> dict:
    """Residuals of ``vol_i(P|E) = sum w_k cos(E, E_k)`` over random ``E`` and of the
    Klain-integral formula for a few random mixed-volume valuations."""
    gen = as_generator(rng)
    worst = 0.0
    for _ in range(trials):
        E = sample_uniform(P.n, i, gen)
        rhs = sum(w * cos_angle(E, F) for F, w in mu.atoms)
        worst = max(worst, abs(projection_volume(P, E) - rhs))
    klain_worst = 0.0
    for _ in range(specs):
        phi = _random_spec(P, i, gen)
        rhs = sum(w * klain(phi, F) for F, w in mu.atoms)
        klain_worst = max(klain_worst, abs(evaluate(phi, P) - rhs))
    return {"projection": worst, "klain": klain_worst, "trials": trials, "specs": specs}


# --- zonoid separation ---------------------------------------------------------------------

def edge_directions(K: Polytope) -> np.ndarray:
    """Unit edge directions of ``K``, one representative per line."""
    out = []
    for F in K.lattice().faces(1):
        d = F.affine_basis[0]
        if not any(abs(abs(d @ e) - 1.0) < 1e-9 for e in out):
            out.append(d)
    return np.array(out).reshape(-1, K.n)


@dataclass
class ZonoidWitness:
    """Even signed measure ``rho = sum_k w_k (delta_{v_k} + delta_{-v_k})`` on the sphere.

    ``objective`` is ``int h_K drho``; ``min_cosine`` is the minimum over the test
    directions of the Klain function ``u -> sum_k w_k |u . v_k|`` of the induced
    valuation ``M -> int h_M drho``.
    """

    directions: np.ndarray
    weights: np.ndarray
    objective: float
    min_cosine: float
    grid_size: int
    test_directions: np.ndarray = field(repr=False)
    iterations: int = 0

    @property
    def atoms(self):
        U = np.vstack([self.directions, -self.directions])
        return list(zip(U, np.concatenate([self.weights, self.weights])))

    def spec(self) -> ValuationSpec:
        return ValuationSpec(self.directions.shape[1], [HIntegralTerm.symmetrized(self.directions, self.weights)])

    def klain_lines(self, U: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(U) @ self.directions.T) @ self.weights

    def to_json(self) -> dict:
        return {
            "n": int(self.directions.shape[1]),
            "grid_size": self.grid_size,
            "objective": self.objective,
            "min_cosine": self.min_cosine,
            "iterations": self.iterations,
            "atoms": [[u.tolist(), float(w)] for u, w in self.atoms],
        }


def _test_directions(K: Polytope, size: int, seed: int) -> np.ndarray:
    G = symmetric_direction_grid(K.n, size, seed=seed)[: max(1, size // 2)]
    return np.vstack([G, edge_directions(K)])


def _grid_seed(rng: RngLike) -> int:
    if isinstance(rng, RandomStream):
        return int(rng.seed)
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    return int(as_generator(rng).integers(2**31))


def zonoid_witness(K: Polytope, grid_size: int = 240, rng: RngLike = None, tol: float = WITNESS_TOL) -> ZonoidWitness:
    """Search for an even signed measure separating ``K`` from the zonoids.

    Raises :class:`NoWitnessFound` when the optimum is not below ``-tol``.
    """
    _check_symmetric(K)
    n = K.n
    if n < 3:
        raise BadDimension("zonoid separation needs n >= 3 (every planar symmetric body is a zonoid)")
    seed = _grid_seed(rng)
    V = symmetric_direction_grid(n, grid_size, seed=seed)[: max(1, grid_size // 2)]
    T = _test_directions(K, grid_size, seed)
    m = len(V)
    width = support_batch(K, V) + support_batch(K, -V)
    A = np.abs(T @ V.T)
    # variables (p, q) with w = p - q; each line carries two atoms of weight w
    c = np.concatenate([width, -width])
    A_ub = -2.0 * np.hstack([A, -A])
    b_ub = np.zeros(len(T))
    A_eq = np.ones((1, 2 * m))
    b_eq = np.array([0.5])
    res = linprog_simplex(c, A_ub, b_ub, A_eq, b_eq)
    w = res.x[:m] - res.x[m:]
    objective = float(w @ width)
    if not objective < -tol:
        raise NoWitnessFound(f"LP optimum {objective:.3g} is not below {-tol:g}", objective=objective)
    keep = np.abs(w) > 1e-14
    min_cos = float(np.min(np.abs(T @ V[keep].T) @ w[keep]))
    return ZonoidWitness(V[keep], w[keep], objective, min_cos, grid_size, T, res.iterations)


@dataclass
class ShiftedWitness:
    spec: ValuationSpec
    t: float
    value_at_K: float
    audit_min: float
    audit_min_shifted: float
    audit_size: int


def audit_directions(K: Polytope, grid_size: int, factor: int = 10, seed: int = 1) -> np.ndarray:
    return _test_directions(K, factor * grid_size, seed)


def shift_to_strict(witness: ZonoidWitness, K: Polytope, factor: int = 10, seed: int = 1) -> ShiftedWitness:
    """Add ``t V_1`` so that the Klain function is strictly positive on a finer audit grid
    while the value at ``K`` stays negative."""
    phi = witness.spec()
    value = evaluate(phi, K)
    if not value < 0:
        raise ShiftImpossible("witness valuation is not negative at K")
    U = audit_directions(K, witness.grid_size, factor, seed)
    audit_min = float(np.min(witness.klain_lines(U)))
    if audit_min > 0:
        t = 0.0
    else:
        t = abs(value) / (2.0 * intrinsic_volume(K, 1))
    shifted_min = audit_min + t
    if not shifted_min > 0:
        raise ShiftImpossible(f"audit negativity {audit_min:.3g} exceeds the admissible shift {t:.3g}")
    spec = phi if t == 0 else phi + ValuationSpec(K.n, [IntrinsicTerm(1, t, K.n)])
    return ShiftedWitness(spec, t, evaluate(spec, K), audit_min, shifted_min, len(U))
