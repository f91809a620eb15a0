"""Volumes, mixed volumes, intrinsic volumes, area measures and valuations on polytopes.

Mixed volumes are read off the polynomial ``lambda -> vol(sum lambda_j K_j)``,
which is interpolated from exact volumes of Minkowski sums on an integer grid.
A valuation is described declaratively by a :class:`ValuationSpec`, a sum of
mixed-volume, support-integral, intrinsic-volume and constant terms.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull

from .errors import BadDimension, DimensionMismatch, IllConditioned, MixedDegrees
from .estimates import CheckResult, Estimate
from .polytope import (
    Cone,
    Polytope,
    _sphere_measure,
    arcs_2d,
    ball_approximant,
    ball_volume,
    exterior_angle,
    face_volume,
    minkowski_sum,
    normal_cone,
    project,
    support_batch,
)
from .subspace import RngLike, Subspace, as_generator, perp, random_unit_vectors
from .transforms import GrassFunction

INTERP_RESIDUAL = 1e-6


def volume(P: Polytope) -> float:
    """``n``-dimensional volume; zero for lower-dimensional bodies."""
    if P.dim < P.n:
        return 0.0
    return P.dim_volume()


# --- mixed volumes -------------------------------------------------------------------

def _exponents(n: int, m: int):
    """All ``alpha`` in N^m with ``|alpha| = n``, in lexicographic order."""
    out = []
    for cut in itertools.combinations(range(n + m - 1), m - 1):
        prev, alpha = -1, []
        for c in cut:
            alpha.append(c - prev - 1)
            prev = c
        alpha.append(n + m - 2 - prev)
        out.append(tuple(alpha))
    return sorted(out, reverse=True)


def _multinomial(alpha) -> float:
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return float(out)


def _sum_volume(bodies, lam) -> float:
    P = functools.reduce(minkowski_sum, [K.scale(float(t)) for K, t in zip(bodies, lam)])
    return volume(P)


@dataclass
class VolumePolynomial:
    """``vol(lambda_1 K_1 + ... + lambda_m K_m)`` as a homogeneous polynomial of degree n.

    ``coeffs[alpha]`` is the coefficient of ``lambda^alpha``; it equals the
    multinomial ``n!/alpha!`` times the corresponding mixed volume.
    """

    bodies: list
    coeffs: dict
    residual: float
    condition: float

    @property
    def n(self) -> int:
        return self.bodies[0].n

    def __call__(self, lam) -> float:
        lam = np.asarray(lam, dtype=float)
        return float(sum(c * np.prod(lam ** np.array(a)) for a, c in self.coeffs.items()))

    def mixed(self, alpha) -> float:
        """Mixed volume with body ``j`` repeated ``alpha[j]`` times."""
        alpha = tuple(int(a) for a in alpha)
        return self.coeffs[alpha] / _multinomial(alpha)


def volume_polynomial(bodies: Sequence[Polytope]) -> VolumePolynomial:
    bodies = list(bodies)
    if not bodies:
        raise ValueError("need at least one body")
    n = bodies[0].n
    if any(K.n != n for K in bodies):
        raise DimensionMismatch("bodies live in different dimensions")
    # centring changes no volume but keeps the Minkowski sums well scaled
    bodies = [K.centered() for K in bodies]
    m = len(bodies)
    alphas = _exponents(n, m)
    grid = list(itertools.product(range(1, n + 1), repeat=m))
    A = np.array([[np.prod(np.array(lam, dtype=float) ** np.array(a)) for a in alphas] for lam in grid])
    b = np.array([_sum_volume(bodies, lam) for lam in grid])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    bn = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(A @ x - b)) / bn if bn > 0 else 0.0
    cond = float(np.linalg.cond(A))
    if resid > INTERP_RESIDUAL:
        raise IllConditioned(
            f"volume interpolation residual {resid:.3g} (condition {cond:.3g})", residual=resid, condition=cond
        )
    return VolumePolynomial(bodies, dict(zip(alphas, x.tolist())), resid, cond)


def _group(bodies):
    distinct, counts = [], []
    for K in bodies:
        for j, D in enumerate(distinct):
            if D is K or (D.vertices.shape == K.vertices.shape and np.array_equal(D.vertices, K.vertices)):
                counts[j] += 1
                break
        else:
            distinct.append(K)
            counts.append(1)
    return distinct, counts


def mixed_volume(bodies: Sequence[Polytope]) -> float:
    """``V(K_1, ..., K_n)``, normalized so that ``V(K, ..., K) = vol(K)``."""
    bodies = list(bodies)
    if not bodies:
        raise ValueError("need at least one body")
    n = bodies[0].n
    if len(bodies) != n:
        raise DimensionMismatch(f"mixed volume in R^{n} needs {n} bodies, got {len(bodies)}")
    if any(K.n != n for K in bodies):
        raise DimensionMismatch("bodies live in different dimensions")
    if any(K.dim == 0 for K in bodies):
        return 0.0
    distinct, counts = _group(bodies)
    if len(distinct) == 1:
        return volume(distinct[0])
    return volume_polynomial(distinct).mixed(counts)


# --- intrinsic volumes ------------------------------------------------------------------

def _ridge_sum(Y: np.ndarray, hull: Optional[ConvexHull] = None) -> float:
    """``V_{d-2}`` of a full-dimensional ``d``-polytope from its triangulated boundary.

    Every ridge of the triangulation contributes its volume times the angle
    between the outer normals of the two adjacent simplices over ``2 pi``;
    ridges inside a flat facet have angle zero.
    """
    hull = ConvexHull(Y) if hull is None else hull
    Y = hull.points
    d = Y.shape[1]
    normals = hull.equations[:, :-1]
    total = 0.0
    for s, simplex in enumerate(hull.simplices):
        for k, t in enumerate(hull.neighbors[s]):
            if t < s:
                continue
            # chord form stays accurate for nearly coplanar neighbours
            ang = 2.0 * math.asin(min(1.0, 0.5 * float(np.linalg.norm(normals[s] - normals[t]))))
            if ang < 1e-9:
                continue
            ridge = np.delete(simplex, k)
            if d == 2:
                vol = 1.0
            else:
                R = Y[ridge[1:]] - Y[ridge[0]]
                vol = math.sqrt(max(np.linalg.det(R @ R.T), 0.0)) / math.factorial(d - 2)
            total += vol * ang / (2 * math.pi)
    return total


def intrinsic_volume_faces(P: Polytope, i: int, rng: RngLike = None) -> float:
    """``sum over i-faces of gamma(F, P) vol_i(F)`` (no shortcuts)."""
    if i == P.dim:
        return P.dim_volume()
    if i > P.dim:
        return 0.0
    return float(sum(exterior_angle(P, F, rng) * face_volume(P, F) for F in P.lattice().faces(i)))


def intrinsic_volume(P: Polytope, i: int, rng: RngLike = None) -> float:
    """``V_i(P)``, computed in the affine hull of ``P``."""
    if not 0 <= i <= P.n:
        raise BadDimension(f"intrinsic volume index {i} outside 0..{P.n}")
    d = P.dim
    if i == 0:
        return 1.0
    if i > d:
        return 0.0
    if i == d:
        return P.dim_volume()
    if i == d - 1:
        return float(ConvexHull(P.local).area) / 2.0
    if i == d - 2:
        return _ridge_sum(P.local)
    return intrinsic_volume_faces(P, i, rng)


# --- projections ---------------------------------------------------------------------

def projection_volume(P: Polytope, E: Subspace) -> float:
    """``vol_i(P|E)`` with ``i = dim E``."""
    return volume(project(P, E))


def unit_cube_in(F: Subspace) -> Polytope:
    """Unit cube spanned by the frame of ``F`` (lower dimensional in R^n)."""
    k = F.dim
    corners = np.array(list(itertools.product([0.0, 1.0], repeat=k)))
    return Polytope(corners @ F.frame)


def projection_volume_mixed(P: Polytope, E: Subspace) -> float:
    """``vol_i(P|E)`` recomputed as ``binom(n, i) V(P[i], L[n-i])`` for a unit cube ``L`` in ``E^perp``."""
    n, i = P.n, E.dim
    L = unit_cube_in(perp(E))
    return math.comb(n, i) * mixed_volume([P] * i + [L] * (n - i))


# --- area measures --------------------------------------------------------------------

@dataclass
class FaceMeasurePiece:
    """Contribution of one ``i``-face to ``S_i(P, .)``.

    The piece is ``density`` times the Hausdorff measure restricted to
    ``region`` (the normal cone) intersected with the unit sphere;
    ``region_measure`` is the measure of that spherical region.
    """

    face_id: tuple
    density: float
    region: Cone
    region_measure: float

    @property
    def mass(self) -> float:
        return self.density * self.region_measure

    @property
    def region_dim(self) -> int:
        return self.region.dim


def area_measure(P: Polytope, i: int, rng: RngLike = None) -> list:
    """Pieces of ``S_i(P, .)``: one per ``i``-face."""
    n = P.n
    if not 0 <= i < n:
        raise BadDimension(f"area measure index {i} outside 0..{n - 1}")
    if i > P.dim:
        return []
    coef = n / ((n - i) * math.comb(n, i))
    sphere = _sphere_measure(n - 1 - i)
    out = []
    for F in P.lattice().faces(i):
        gamma = 1.0 if i == P.dim else exterior_angle(P, F, rng)
        out.append(FaceMeasurePiece((i, F.index), coef * face_volume(P, F), normal_cone(P, F), gamma * sphere))
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _integrate_piece(P: Polytope, piece: FaceMeasurePiece, f, gen, samples: int):
    cone = piece.region
    W = cone.span
    k = W.shape[0]
    F = P.lattice().faces_by_dim[piece.face_id[0]][piece.face_id[1]]
    D = (P.vertices - P.vertices[F.vertex_ids[0]]) @ W.T
    if k == 1:
        signs = np.array([[1.0], [-1.0]])
        keep = np.all(signs @ D.T <= 1e-9 * max(1.0, float(np.abs(D).max(initial=0.0))), axis=1)
        vals = np.asarray(f(signs[keep] @ W), dtype=float)
        return float(vals.sum()), 0.0
    if k == 2:
        total = 0.0
        for a, b in arcs_2d(D):
            t = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
            pts = np.cos(t)[:, None] * W[0] + np.sin(t)[:, None] * W[1]
            total += 0.5 * (b - a) * float(_GL_WEIGHTS @ np.asarray(f(pts), dtype=float))
        return total, 0.0
    Z = gen.standard_normal((samples, k))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    inside = np.all(Z @ D.T <= 0, axis=1)
    vals = np.zeros(samples)
    if inside.any():
        vals[inside] = np.asarray(f(Z[inside] @ W), dtype=float)
    scale = _sphere_measure(k - 1)
    return scale * float(vals.mean()), scale * float(vals.std(ddof=1) / math.sqrt(samples))


def integrate_against_area_measure(
    P: Polytope, i: int, f: Callable[[np.ndarray], np.ndarray], rng: RngLike = None, samples: int = 200_000
) -> Estimate:
    """``int f dS_i(P, .)`` for ``f`` acting on an array of unit vectors (rows).

    Point and arc regions are integrated deterministically (64-point
    Gauss-Legendre per arc); higher-dimensional regions by Monte Carlo.
    """
    gen = as_generator(rng)
    value, var = 0.0, 0.0
    sampled = 0
    for piece in area_measure(P, i, gen):
        v, se = _integrate_piece(P, piece, f, gen, samples)
        value += piece.density * v
        var += (piece.density * se) ** 2
        if piece.region_dim > 2:
            sampled += samples
    return Estimate(value, math.sqrt(var), sampled)


# --- valuation specs -------------------------------------------------------------------

@dataclass
class MixedVolumeTerm:
    """``coeff * V(K[degree], L_1, ..., L_{n-degree})``."""

    degree: int
    bodies: list
    coeff: float = 1.0

    def __post_init__(self):
        self.bodies = list(self.bodies)
        if not self.bodies:
            raise ValueError("a mixed-volume term of degree n has no companion bodies; use an intrinsic term")
        n = self.bodies[0].n
        if len(self.bodies) != n - self.degree:
            raise DimensionMismatch(f"degree {self.degree} term in R^{n} needs {n - self.degree} bodies")

    @property
    def n(self) -> int:
        return self.bodies[0].n

    def value(self, K: Polytope) -> float:
        return self.coeff * mixed_volume([K] * self.degree + self.bodies)

    def klain(self, E: Subspace) -> float:
        Ep = perp(E)
        proj = [project(L, Ep) for L in self.bodies]
        return self.coeff * mixed_volume(proj) / math.comb(self.n, self.degree)


@dataclass
class HIntegralTerm:
    """``sum_k w_k h(K, u_k)`` over an even atomic measure (atoms in ``+-u`` pairs)."""

    directions: np.ndarray
    weights: np.ndarray
    degree: int = field(default=1, init=False)

    def __post_init__(self):
        self.directions = np.array(self.directions, dtype=float, ndmin=2)
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if len(self.directions) != len(self.weights):
            raise DimensionMismatch("one weight per direction")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("directions must be unit vectors")
        if not self._is_even():
            raise ValueError("support-integral atoms must come in +-u pairs with equal weight")

    def _is_even(self, tol: float = 1e-9) -> bool:
        U, w = self.directions, self.weights
        d = np.linalg.norm(U[:, None, :] + U[None, :, :], axis=2)
        for k in range(len(U)):
            partners = np.nonzero(d[k] <= tol)[0]
            if not np.any(np.abs(w[partners] - w[k]) <= tol * max(1.0, abs(w[k]))):
                return False
        return True

    @classmethod
    def symmetrized(cls, directions, weights) -> "HIntegralTerm":
        """Atoms ``+-u_k`` each carrying ``w_k``."""
        U = np.array(directions, dtype=float, ndmin=2)
        U = U / np.linalg.norm(U, axis=1, keepdims=True)
        w = np.asarray(weights, dtype=float).ravel()
        return cls(np.vstack([U, -U]), np.concatenate([w, w]))

    @property
    def n(self) -> int:
        return self.directions.shape[1]

    def value(self, K: Polytope) -> float:
        return float(self.weights @ support_batch(K, self.directions))

    def klain_lines(self, U: np.ndarray) -> np.ndarray:
        """Klain function at the lines spanned by the rows of ``U`` (unit vectors)."""
        return 0.5 * np.abs(np.asarray(U) @ self.directions.T) @ self.weights

    def klain(self, E: Subspace) -> float:
        if E.dim != 1:
            raise MixedDegrees("support-integral terms have degree 1")
        return float(self.klain_lines(E.frame)[0])


@dataclass
class IntrinsicTerm:
    """``coeff * V_i``."""

    i: int
    coeff: float = 1.0
    n: Optional[int] = None

    @property
    def degree(self) -> int:
        return self.i

    def value(self, K: Polytope) -> float:
        return self.coeff * intrinsic_volume(K, self.i)

    def klain(self, E: Subspace) -> float:
        return self.coeff


@dataclass
class ConstantTerm:
    value_: float
    n: Optional[int] = None
    degree: int = field(default=0, init=False)

    def value(self, K: Polytope) -> float:
        return self.value_

    def klain(self, E: Subspace) -> float:
        raise MixedDegrees("a constant has degree 0 and no Klain function on proper subspaces")


Term = Union[MixedVolumeTerm, HIntegralTerm, IntrinsicTerm, ConstantTerm]


@dataclass
class ValuationSpec:
    """Finite sum of terms, evaluated term by term on polytopes of R^n."""

    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        self.terms = list(self.terms)
        for t in self.terms:
            tn = getattr(t, "n", None)
            if tn is not None and tn != self.n:
                raise DimensionMismatch(f"term lives in R^{tn}, spec in R^{self.n}")
            if not 0 <= t.degree <= self.n:
                raise BadDimension(f"term degree {t.degree} outside 0..{self.n}")

    @property
    def degrees(self) -> set:
        return {t.degree for t in self.terms}

    @property
    def degree(self) -> Optional[int]:
        d = self.degrees
        return d.pop() if len(d) == 1 else None

    def __add__(self, other: "ValuationSpec") -> "ValuationSpec":
        if other.n != self.n:
            raise DimensionMismatch("cannot add valuations on different spaces")
        return ValuationSpec(self.n, self.terms + other.terms)

    def scaled(self, a: float) -> "ValuationSpec":
        out = []
        for t in self.terms:
            if isinstance(t, MixedVolumeTerm):
                out.append(MixedVolumeTerm(t.degree, t.bodies, a * t.coeff))
            elif isinstance(t, HIntegralTerm):
                out.append(HIntegralTerm(t.directions, a * t.weights))
            elif isinstance(t, IntrinsicTerm):
                out.append(IntrinsicTerm(t.i, a * t.coeff, t.n))
            else:
                out.append(ConstantTerm(a * t.value_, t.n))
        return ValuationSpec(self.n, out)

    def __call__(self, K: Polytope) -> float:
        return evaluate(self, K)

    @classmethod
    def intrinsic(cls, n: int, i: int, coeff: float = 1.0) -> "ValuationSpec":
        return cls(n, [IntrinsicTerm(i, coeff, n)])


def evaluate(phi: ValuationSpec, K: Polytope) -> float:
    if K.n != phi.n:
        raise DimensionMismatch(f"valuation on R^{phi.n} applied to a body in R^{K.n}")
    return float(sum(t.value(K) for t in phi.terms))


def klain(phi: ValuationSpec, E: Subspace) -> float:
    """Klain function of a homogeneous spec at ``E``."""
    if E.ambient_dim != phi.n:
        raise DimensionMismatch("subspace and valuation live in different dimensions")
    degs = phi.degrees
    if degs and degs != {E.dim}:
        raise MixedDegrees(f"spec has degrees {sorted(degs)}, subspace has dimension {E.dim}")
    return float(sum(t.klain(E) for t in phi.terms))


def klain_function(phi: ValuationSpec) -> GrassFunction:
    """``Klain_phi`` as a :class:`GrassFunction`, vectorized where the terms allow it."""
    i = phi.degree
    if i is None or i == 0:
        raise MixedDegrees("Klain functions need a spec homogeneous of positive degree")

    def ev(E):
        return klain(phi, E)

    def batch(frames):
        out = np.zeros(len(frames))
        for t in phi.terms:
            if isinstance(t, HIntegralTerm):
                out += t.klain_lines(frames[:, 0, :])
            else:
                out += t.coeff
        return out

    vectorized = all(isinstance(t, (HIntegralTerm, IntrinsicTerm)) for t in phi.terms)
    return GrassFunction(phi.n, i, ev, batch if vectorized else None)


# --- decomposition, angularity, inverse Klain -----------------------------------------------

@dataclass
class Components:
    values: list
    residual: float
    condition: float
    total: float


def homogeneous_components(phi, K: Polytope, degree: Optional[int] = None) -> Components:
    """Values ``phi_0(K), ..., phi_n(K)`` of the homogeneous parts of ``phi`` at ``K``.

    ``phi`` is a :class:`ValuationSpec` or any callable on polytopes.  The
    polynomial ``t -> phi(tK)`` is sampled at ``t = 0..n`` and solved for; the
    residual is the relative misprediction of ``phi((n+1)K)``.
    """
    f = phi if callable(phi) else (lambda M: evaluate(phi, M))
    n = K.n if degree is None else degree
    ts = np.arange(n + 1, dtype=float)
    y = np.array([f(K.scale(t)) for t in ts])
    V = np.vander(ts, n + 1, increasing=True)
    c = np.linalg.solve(V, y)
    held_out = f(K.scale(n + 1.0))
    predicted = float(np.polynomial.polynomial.polyval(n + 1.0, c))
    resid = abs(predicted - held_out) / max(1.0, abs(held_out), float(np.max(np.abs(y))))
    cond = float(np.linalg.cond(V))
    if resid > 1e-8:
        raise IllConditioned(f"decomposition residual {resid:.3g}", residual=resid, condition=cond)
    return Components(c.tolist(), resid, cond, float(y[1]))


def direction_subspace(P: Polytope, F) -> Subspace:
    return Subspace(F.affine_basis, check=False)


def angular_evaluate(g: GrassFunction, P: Polytope, i: int, rng: RngLike = None) -> float:
    """``sum over i-faces F of g(direction of F) gamma(F, P) vol_i(F)``."""
    if g.degree != i:
        raise DimensionMismatch("function degree and face dimension differ")
    if i > P.dim:
        return 0.0
    if i == P.dim:
        return g(Subspace(P.basis, check=False)) * P.dim_volume()
    total = 0.0
    for F in P.lattice().faces(i):
        total += g(direction_subspace(P, F)) * exterior_angle(P, F, rng) * face_volume(P, F)
    return float(total)


def inverse_klain_top(f: Callable[[Subspace], float], P: Polytope) -> float:
    """``(1/2) int f(u^perp) dS_{n-1}(P, u)`` evaluated facet by facet."""
    n = P.n
    if P.dim < n - 1:
        return 0.0
    total = 0.0
    for piece in area_measure(P, n - 1):
        F = P.lattice().faces_by_dim[piece.face_id[0]][piece.face_id[1]]
        total += 0.5 * f(Subspace(F.affine_basis, check=False)) * piece.mass
    return float(total)


# --- support-function check --------------------------------------------------------------------

@dataclass
class RadonSupportCheck:
    lhs: float
    rhs: Estimate
    check: CheckResult


def lemradon_check(K: Polytope, E: Subspace, rng: RngLike = None, samples: int = 100_000, slack: float = 0.02) -> RadonSupportCheck:
    """Compare ``V(K, B[i-1] : E)`` with ``omega_i`` times the mean of ``h_K`` over lines of ``E``.

    The left side is a mixed volume inside ``E`` against the ball approximant;
    the right side a Monte Carlo average.  Agreement is judged at
    ``3 sigma + slack * |lhs|``.
    """
    i = E.dim
    Kc = K.centered()
    KE = project(Kc, E)
    if i == 1:
        lhs = volume(KE)
    else:
        lhs = mixed_volume([KE] + [ball_approximant(i)] * (i - 1))
    gen = as_generator(rng)
    U = random_unit_vectors(gen, samples, i) @ E.frame
    rhs_est = Estimate.from_samples(ball_volume(i) * support_batch(Kc, U))
    check = CheckResult.compare(Estimate.exact(lhs), rhs_est, slack=slack * abs(lhs))
    return RadonSupportCheck(lhs, rhs_est, check)
