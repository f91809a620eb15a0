"""Circumradius, inradius, successive outer/inner radii and the Perelman bound.

``R_i(K)`` is the smallest circumradius of a projection of ``K`` onto an
``i``-subspace and ``r_i(K)`` the largest inradius of a section of ``K`` by an
affine ``i``-flat.  Both optimize over the Grassmannian and are bounded here by
sampling plus local refinement: the reported ``R_i_upper`` never falls below the
true ``R_i`` and ``r_i_lower`` never exceeds the true ``r_i``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .polytope import Polytope
from .subspace import RandomStream, RngLike, as_generator, as_stream, complement_frame, sample_uniform_batch

CHUNK = 2000
SCREEN = 20
REFINE_STEPS = 50


# --- minimum enclosing ball ---------------------------------------------------------------

def _ball_through(B: list):
    if not B:
        return None, -1.0
    p0 = B[0]
    if len(B) == 1:
        return p0.copy(), 0.0
    Q = np.array(B[1:]) - p0
    rhs = 0.5 * np.sum(Q * Q, axis=1)
    lam, *_ = np.linalg.lstsq(Q @ Q.T, rhs, rcond=None)
    c = p0 + lam @ Q
    return c, float(np.linalg.norm(c - p0))


def _inside(ball, p) -> bool:
    c, r = ball
    if c is None:
        return False
    return float(np.sum((p - c) ** 2)) <= r * r * (1 + 1e-12) + 1e-24


def _mtf(pts: list, end: int, boundary: list, d: int):
    ball = _ball_through(boundary)
    if len(boundary) == d + 1:
        return ball
    for k in range(end):
        p = pts[k]
        if not _inside(ball, p):
            ball = _mtf(pts, k, boundary + [p], d)
            pts.insert(0, pts.pop(k))
    return ball


def min_enclosing_ball(X: np.ndarray):
    """Smallest ball containing the rows of ``X`` (Welzl's algorithm, move-to-front)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pts = [x for x in X]
    c, r = _mtf(pts, len(pts), [], X.shape[1])
    return max(r, 0.0), c


def circumradius(P: Polytope):
    """``(R, center)`` of the smallest ball containing ``P``."""
    if P.dim == 0:
        return 0.0, P.vertices[0].copy()
    r, c = min_enclosing_ball(P.local)
    return r, P.origin + c @ P.basis


def _chebyshev(A: np.ndarray, b: np.ndarray, norms: np.ndarray):
    """Maximize ``r`` subject to ``A c + r norms <= b``; returns ``(r, c)``."""
    d = A.shape[1]
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    res = linprog(
        cost,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        return 0.0, None
    c = res.x[:-1]
    # certify: the largest radius that is exactly feasible at the returned centre
    with np.errstate(divide="ignore", invalid="ignore"):
        room = np.where(norms > 0, (b - A @ c) / norms, np.inf)
    return max(0.0, min(float(res.x[-1]), float(np.min(room)))), c


def inradius(P: Polytope):
    """``(r, center)`` of the largest ball inside ``P``, measured in its affine hull."""
    if P.dim == 0:
        return 0.0, P.vertices[0].copy()
    facets = P.facets()
    A = np.array([a for a, _, _ in facets])
    b = np.array([o for _, o, _ in facets])
    r, c = _chebyshev(A, b, np.linalg.norm(A, axis=1))
    return r, P.origin + c @ P.basis


# --- successive radii ---------------------------------------------------------------------------

def _facet_system(P: Polytope):
    """Facet inequalities ``A x <= b`` of a full-dimensional ``P`` in ambient coordinates."""
    facets = P.facets()
    A = np.array([a @ P.basis for a, _, _ in facets])
    b = np.array([o for _, o, _ in facets]) + A @ P.origin
    return A, b


def _outer(P: Polytope, U: np.ndarray) -> float:
    return min_enclosing_ball(P.vertices @ U.T)[0]


def _inner(P: Polytope, system, U: np.ndarray) -> float:
    """Largest inradius among sections of ``P`` by flats parallel to ``span(U)``."""
    if P.dim < P.n:
        return 0.0
    A, b = system
    return _chebyshev(A, b, np.linalg.norm(A @ U.T, axis=1))[0]


def _refine(objective, U: np.ndarray, sign: float, steps: int = REFINE_STEPS):
    """Coordinate search over Givens rotations of the frame; ``sign=+1`` minimizes."""
    W = complement_frame(U)
    best = objective(U)
    delta = 0.1
    for _ in range(steps):
        improved = False
        for a in range(U.shape[0]):
            for bidx in range(W.shape[0]):
                for s in (delta, -delta):
                    c, t = math.cos(s), math.sin(s)
                    U2, W2 = U.copy(), W.copy()
                    U2[a] = c * U[a] + t * W[bidx]
                    W2[bidx] = -t * U[a] + c * W[bidx]
                    val = objective(U2)
                    if sign * (val - best) < 0:
                        U, W, best, improved = U2, W2, val, True
                        break
        if not improved:
            delta *= 0.5
            if delta < 1e-12:
                break
    return best, U


@dataclass
class RadiiReport:
    i: int
    R_i_upper: float
    r_i_lower: float
    samples: int
    seed: Optional[int]
    refined: bool = True

    def to_json(self) -> dict:
        return asdict(self)


def _seed_of(rng: RngLike) -> Optional[int]:
    if isinstance(rng, RandomStream):
        return rng.seed
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    return None


def successive_radii(P: Polytope, i: int, samples: int = 10_000, rng: RngLike = None, refine: bool = True) -> RadiiReport:
    """Sampled bounds ``R_i_upper >= R_i(P)`` and ``r_i_lower <= r_i(P)``.

    Subspaces are drawn in chunks; in each chunk cheap centroid-based bounds
    screen the candidates, the best few are evaluated exactly (minimum enclosing
    ball of the projection, Chebyshev LP over all parallel sections) and the best
    of the chunk is refined by coordinate search.  A larger sample count drawn
    from the same stream only adds chunks, so the bounds improve monotonically.
    """
    n = P.n
    if not 1 <= i <= n:
        raise ValueError(f"index {i} outside 1..{n}")
    seed = _seed_of(rng)
    if i == n:
        return RadiiReport(i, circumradius(P)[0], inradius(P)[0] if P.dim == n else 0.0, 0, seed, False)
    gen = as_generator(rng)
    frames = sample_uniform_batch(n, i, samples, gen)
    g = P.origin
    Vc = P.vertices - g
    system = _facet_system(P) if P.dim == n else None
    R_best, r_best = math.inf, 0.0

    def outer(U):
        return _outer(P, U)

    def inner(U):
        return _inner(P, system, U)

    for start in range(0, samples, CHUNK):
        block = frames[start : start + CHUNK]
        proj = np.einsum("vn,min->mvi", Vc, block)
        R_proxy = np.sqrt(np.max(np.sum(proj**2, axis=2), axis=1))
        cand = np.argsort(R_proxy)[:SCREEN]
        vals = [outer(block[k]) for k in cand]
        k = int(np.argmin(vals))
        R_chunk = vals[k]
        if refine:
            R_chunk = min(R_chunk, _refine(outer, block[cand[k]], +1.0)[0])
        R_best = min(R_best, R_chunk)
        if system is not None:
            A, b = system
            slack = b - A @ g
            rn = np.linalg.norm(np.einsum("fn,min->mfi", A, block), axis=2)
            with np.errstate(divide="ignore"):
                r_proxy = np.min(np.where(rn > 0, slack[None, :] / rn, np.inf), axis=1)
            cand = np.argsort(-r_proxy)[:SCREEN]
            vals = [inner(block[k]) for k in cand]
            k = int(np.argmax(vals))
            r_chunk = vals[k]
            if refine:
                r_chunk = max(r_chunk, _refine(inner, block[cand[k]], -1.0)[0])
            r_best = max(r_best, r_chunk, float(np.max(r_proxy)))
    return RadiiReport(i, float(R_best), float(r_best), samples, seed, refine)


def radii_chain(P: Polytope, samples: int = 10_000, rng: RngLike = None, refine: bool = True) -> list:
    """Reports for ``i = 1..n`` with the chain relations used to tighten each bound.

    ``R_i <= R_{i+1}`` because an ``i``-subspace of the best ``(i+1)``-subspace
    projects no wider; ``r_i >= r_{i+1}`` because an ``i``-flat through the
    centre of the best ``(i+1)``-section contains an equally large ball.
    """
    stream = as_stream(rng)
    reps = [successive_radii(P, i, samples, s, refine) for i, s in zip(range(1, P.n + 1), stream.split(P.n))]
    for k in range(P.n - 2, -1, -1):
        reps[k].R_i_upper = min(reps[k].R_i_upper, reps[k + 1].R_i_upper)
        reps[k].r_i_lower = max(reps[k].r_i_lower, reps[k + 1].r_i_lower)
    return reps


@dataclass
class PerelmanResult:
    status: str
    ratio: float
    bound: int

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def perelman_check(P: Polytope, i: int, outer_report: RadiiReport, inner_report: RadiiReport) -> PerelmanResult:
    """Check ``R_{n-i+1} / r_i <= i + 1`` from sampled bounds.

    The ratio of bounds dominates the true ratio, so a pass confirms the
    inequality; a failure only means the bounds are too loose.
    """
    n = P.n
    if outer_report.i != n - i + 1 or inner_report.i != i:
        raise ValueError("reports must be for indices n - i + 1 (outer) and i (inner)")
    r = inner_report.r_i_lower
    ratio = outer_report.R_i_upper / r if r > 0 else math.inf
    return PerelmanResult("PASS" if ratio <= i + 1 else "INCONCLUSIVE", ratio, i + 1)
