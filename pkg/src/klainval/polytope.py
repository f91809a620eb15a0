"""Vertex-described convex polytopes, their face lattices and normal cones.

Polytopes may be lower dimensional.  Every combinatorial computation is done
in coordinates of the affine hull, so a triangle in R^3 has the same face
lattice, face volumes and exterior angles as the same triangle in R^2.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull

from .errors import DegenerateFace, DimensionMismatch
from .subspace import RandomStream, RngLike, Subspace, as_generator, complement_frame

TOL = 1e-9
MC_ANGLE_SAMPLES = 10**6


def _affine_hull(X: np.ndarray):
    origin = X.mean(axis=0)
    R = X - origin
    scale = max(1.0, float(np.max(np.linalg.norm(R, axis=1)))) if len(X) else 1.0
    if len(X) == 1:
        return origin, np.zeros((0, X.shape[1]))
    _, sv, vt = np.linalg.svd(R, full_matrices=False)
    d = int(np.sum(sv > TOL * scale))
    return origin, vt[:d].copy()


def _lex_order(X: np.ndarray) -> np.ndarray:
    Xr = np.round(X, 9)
    return np.lexsort(Xr.T[::-1])


def _facet_groups(Y: np.ndarray, equations: np.ndarray, tol: float):
    """Merge simplicial hull facets into true facets: list of (normal, offset, index tuple)."""
    groups = {}
    for eq in equations:
        a, b = eq[:-1], -eq[-1]
        on = np.nonzero(np.abs(Y @ a - b) <= tol)[0]
        key = tuple(on.tolist())
        groups.setdefault(key, []).append(a)
    out = []
    for key, normals in groups.items():
        a = np.mean(normals, axis=0)
        a /= np.linalg.norm(a)
        out.append((a, float(np.max(Y @ a)), key))
    return out


class Polytope:
    """Convex hull of finitely many points in R^n, stored by its vertices.

    ``vertices`` are exactly the extreme points, sorted lexicographically.
    Derived structures (facets, face lattice) are computed lazily and cached.
    """

    def __init__(self, points, *, _reduced: bool = False):
        X = np.array(points, dtype=float, ndmin=2)
        if X.size == 0:
            raise ValueError("a polytope needs at least one point")
        self.n = X.shape[1]
        if _reduced:
            V = X
            origin, basis = _affine_hull(V)
            facets = None
        else:
            V, origin, basis, facets = _reduce(X)
        order = _lex_order(V)
        V = V[order]
        inverse = np.empty_like(order)
        inverse[order] = np.arange(len(order))
        self.vertices = V
        self.vertices.setflags(write=False)
        self.origin = V.mean(axis=0)
        self.basis = basis
        self.dim = basis.shape[0]
        self._facets = None
        if facets is not None:
            self._facets = [(a, b, tuple(sorted(int(inverse[k]) for k in ids))) for a, b, ids in facets]
        self._lattice: Optional[FaceLattice] = None
        self._local = None

    # --- basic geometry ------------------------------------------------------------
    @property
    def local(self) -> np.ndarray:
        """Vertex coordinates in the affine hull (relative to the vertex centroid)."""
        if self._local is None:
            self._local = (self.vertices - self.origin) @ self.basis.T
        return self._local

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def facets(self):
        """Facets relative to the affine hull as ``(outer normal, offset, vertex ids)``.

        Normals live in hull coordinates (length ``dim``); offsets are relative to
        ``origin``.
        """
        if self._facets is None:
            self._facets = _compute_facets(self.local)
        return self._facets

    def translate(self, v) -> "Polytope":
        return Polytope(self.vertices + np.asarray(v, dtype=float), _reduced=True)

    def scale(self, t: float) -> "Polytope":
        if t == 0:
            return Polytope(np.zeros((1, self.n)), _reduced=True)
        if t < 0:
            return Polytope(self.vertices * t, _reduced=True)
        return Polytope(self.vertices * t, _reduced=True)

    def __neg__(self) -> "Polytope":
        return self.scale(-1.0)

    def centered(self) -> "Polytope":
        return self.translate(-self.origin)

    def dim_volume(self) -> float:
        """Volume in the affine hull (``dim``-dimensional Hausdorff measure)."""
        d = self.dim
        if d == 0:
            return 1.0
        Y = self.local
        if d == 1:
            return float(Y.max() - Y.min())
        return float(ConvexHull(Y).volume)

    def lattice(self) -> "FaceLattice":
        if self._lattice is None:
            self._lattice = _build_lattice(self)
        return self._lattice

    def to_json(self) -> dict:
        return {"n": self.n, "vertices": self.vertices.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Polytope":
        if "generators" in obj:
            return zonotope(obj["generators"], center=obj.get("center"))
        pts = obj["vertices"]
        if any(len(p) != obj["n"] for p in pts):
            raise DimensionMismatch("vertex length does not match n")
        return cls(pts)

    def __repr__(self) -> str:
        return f"Polytope(n={self.n}, dim={self.dim}, vertices={self.num_vertices})"


def _reduce(X: np.ndarray):
    origin, basis = _affine_hull(X)
    d = basis.shape[0]
    Y = (X - origin) @ basis.T
    if d == 0:
        return X[:1].copy(), origin, basis, None
    if d == 1:
        idx = [int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))]
        return X[idx].copy(), origin, basis, None
    hull = ConvexHull(Y)
    cand = np.unique(hull.vertices)
    Yc = Y[cand]
    scale = max(1.0, float(np.max(np.abs(Yc))))
    groups = _facet_groups(Yc, hull.equations, TOL * scale)
    normals = np.array([g[0] for g in groups])
    keep = []
    for k in range(len(cand)):
        rows = [j for j, g in enumerate(groups) if k in g[2]]
        if np.linalg.matrix_rank(normals[rows], tol=1e-9) == d:
            keep.append(k)
    keep = np.array(keep)
    remap = {int(k): j for j, k in enumerate(keep)}
    facets = []
    for a, b, ids in groups:
        new = tuple(remap[k] for k in ids if k in remap)
        facets.append((a, b, new))
    V = X[cand[keep]]
    # facet offsets were measured from the input centroid; re-anchor at vertex centroid
    shift = (V.mean(axis=0) - origin) @ basis.T
    facets = [(a, b - float(a @ shift), ids) for a, b, ids in facets]
    return V.copy(), origin, basis, facets


def _compute_facets(Y: np.ndarray):
    d = Y.shape[1]
    if d == 0:
        return []
    if d == 1:
        lo, hi = int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))
        return [(np.array([-1.0]), float(-Y[lo, 0]), (lo,)), (np.array([1.0]), float(Y[hi, 0]), (hi,))]
    hull = ConvexHull(Y)
    scale = max(1.0, float(np.max(np.abs(Y))))
    return _facet_groups(Y, hull.equations, TOL * scale)


@dataclass(frozen=True)
class Face:
    dim: int
    vertex_ids: tuple
    affine_basis: np.ndarray = field(repr=False, compare=False)
    index: int = 0
    facet_ids: tuple = field(default=(), repr=False, compare=False)


@dataclass
class FaceLattice:
    """All nonempty faces, including the polytope itself at ``dim P``.

    ``incidence[(k, j)]`` lists the indices of the ``(k+1)``-faces covering face
    ``j`` of dimension ``k``.
    """

    faces_by_dim: list
    incidence: dict

    def counts(self) -> tuple:
        return tuple(len(f) for f in self.faces_by_dim)

    def proper_counts(self) -> tuple:
        return self.counts()[:-1]

    def euler_sum(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts()))

    def faces(self, k: int) -> list:
        if 0 <= k < len(self.faces_by_dim):
            return self.faces_by_dim[k]
        return []


def _direction_basis(pts: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, pts.shape[1]))
    R = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(R, full_matrices=False)
    return vt[:k].copy()


def _build_lattice(P: Polytope) -> FaceLattice:
    d = P.dim
    nv = P.num_vertices
    if d == 0:
        top = Face(0, (0,), np.zeros((0, P.n)), 0, ())
        return FaceLattice([[top]], {})
    facet_sets = [frozenset(ids) for _, _, ids in P.facets()]
    levels = [dict() for _ in range(d + 1)]
    levels[d][frozenset(range(nv))] = None
    for s in facet_sets:
        levels[d - 1][s] = None
    cover = {}
    for s in facet_sets:
        cover.setdefault((d - 1, s), set()).add(frozenset(range(nv)))
    for k in range(d - 1, 0, -1):
        for G in list(levels[k]):
            cands = set()
            for F in facet_sets:
                if G <= F:
                    continue
                inter = G & F
                if inter:
                    cands.add(inter)
            maximal = [c for c in cands if not any(c < o for o in cands)]
            for c in maximal:
                levels[k - 1][c] = None
                cover.setdefault((k - 1, c), set()).add(G)
    for v in range(nv):
        levels[0].setdefault(frozenset([v]), None)
    faces_by_dim = []
    index_of = []
    for k in range(d + 1):
        keys = sorted(levels[k], key=lambda s: tuple(sorted(s)))
        index_of.append({s: j for j, s in enumerate(keys)})
        row = []
        for j, s in enumerate(keys):
            ids = tuple(sorted(s))
            fids = tuple(m for m, F in enumerate(facet_sets) if s <= F)
            row.append(Face(k, ids, _direction_basis(P.vertices[list(ids)], k), j, fids))
        faces_by_dim.append(row)
    incidence = {}
    for (k, s), ups in cover.items():
        incidence[(k, index_of[k][s])] = sorted(index_of[k + 1][u] for u in ups)
    return FaceLattice(faces_by_dim, incidence)


def convex_hull(points: Sequence) -> Polytope:
    try:
        X = np.array(points, dtype=float, ndmin=2)
    except ValueError as exc:
        raise DimensionMismatch("points have mixed dimensions") from exc
    if X.ndim != 2:
        raise DimensionMismatch("points have mixed dimensions")
    return Polytope(X)


def face_lattice(P: Polytope) -> FaceLattice:
    return P.lattice()


def face_volume(P: Polytope, F) -> float:
    F = _face_from(P, F)
    k = F.dim
    if k == 0:
        return 1.0
    pts = P.vertices[list(F.vertex_ids)]
    Y = (pts - pts.mean(axis=0)) @ F.affine_basis.T
    if k == 1:
        return float(Y.max() - Y.min())
    return float(ConvexHull(Y).volume)


@dataclass(frozen=True)
class Cone:
    """Closed convex cone with apex at the origin.

    ``generators`` are unit rays; ``lineality`` is an orthonormal basis of the
    largest linear subspace contained in the cone; ``span`` an orthonormal basis
    of its linear hull.  Membership is decided by ``constraints @ x <= 0``.
    """

    generators: np.ndarray
    lineality: np.ndarray
    span: np.ndarray
    constraints: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.span.shape[0]

    def contains(self, x, tol: float = TOL) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lhs = x @ self.constraints.T
        norms = np.linalg.norm(x, axis=1)
        if lhs.shape[1] == 0:
            ok = np.ones(len(x), dtype=bool)
        else:
            ok = np.all(lhs <= tol * np.maximum(norms, 1e-300)[:, None] * self._cscale, axis=1)
        resid = x - (x @ self.span.T) @ self.span
        return ok & (np.linalg.norm(resid, axis=1) <= tol * np.maximum(norms, 1.0))

    @property
    def _cscale(self) -> float:
        if self.constraints.size == 0:
            return 1.0
        return max(1.0, float(np.max(np.linalg.norm(self.constraints, axis=1))))


def _face_from(P: Polytope, F) -> Face:
    if isinstance(F, Face):
        return F
    k, j = F
    return P.lattice().faces_by_dim[k][j]


def normal_cone(P: Polytope, F) -> Cone:
    F = _face_from(P, F)
    lin = complement_frame(P.basis) if P.dim < P.n else np.zeros((0, P.n))
    if P.dim == 0:
        lin = np.eye(P.n)
    facets = P.facets()
    gens = [facets[m][0] @ P.basis for m in F.facet_ids]
    gens = np.array(gens) if gens else np.zeros((0, P.n))
    if len(lin):
        gens = np.vstack([gens, lin, -lin])
    span = complement_frame(F.affine_basis) if F.dim > 0 else np.eye(P.n)
    v0 = P.vertices[F.vertex_ids[0]]
    cons = P.vertices - v0
    return Cone(gens, lin, span, cons)


def _sphere_measure(m: int) -> float:
    """H^m measure of the unit sphere S^m."""
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def arcs_2d(D: np.ndarray) -> list:
    """Angular intervals of ``{(cos t, sin t): D @ x <= 0}`` as ``(start, end)`` pairs."""
    if len(D):
        D = D[np.linalg.norm(D, axis=1) > TOL * max(1.0, float(np.max(np.linalg.norm(D, axis=1))))]
    if len(D) == 0:
        return [(0.0, 2 * math.pi)]
    phis = np.arctan2(D[:, 1], D[:, 0])
    cuts = np.mod(np.concatenate([phis + math.pi / 2, phis - math.pi / 2]), 2 * math.pi)
    cuts = np.unique(np.round(cuts, 14))
    cuts = np.append(cuts, cuts[0] + 2 * math.pi)
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-15:
            continue
        mid = 0.5 * (a + b)
        x = np.array([math.cos(mid), math.sin(mid)])
        if np.all(D @ x <= 0):
            pieces.append([float(a), float(b)])
    merged = []
    for p in pieces:
        if merged and abs(merged[-1][1] - p[0]) < 1e-12:
            merged[-1][1] = p[1]
        else:
            merged.append(p)
    if len(merged) > 1 and abs(merged[-1][1] - (merged[0][0] + 2 * math.pi)) < 1e-12:
        last = merged.pop()
        merged[0] = [last[0], merged[0][1] + 2 * math.pi]
    return [tuple(m) for m in merged]


def _spherical_polygon_area(G: np.ndarray) -> float:
    """Area of the spherical polygon with unit vertices ``G`` (a pointed 3-cone)."""
    axis = G.sum(axis=0)
    axis /= np.linalg.norm(axis)
    e = complement_frame(axis[None, :])
    ang = np.arctan2(G @ e[1], G @ e[0])
    G = G[np.argsort(ang)]
    m = len(G)
    total = 0.0
    for j in range(m):
        a, p, q = G[j], G[j - 1], G[(j + 1) % m]
        t1 = p - (a @ p) * a
        t2 = q - (a @ q) * a
        c = float(t1 @ t2 / (np.linalg.norm(t1) * np.linalg.norm(t2)))
        total += math.acos(max(-1.0, min(1.0, c)))
    return total - (m - 2) * math.pi


def exterior_angle(P: Polytope, F, rng: RngLike = None, samples: int = MC_ANGLE_SAMPLES) -> float:
    """Normalized exterior angle: the fraction of the unit sphere in the span of the
    normal cone at ``F`` that the cone covers.

    Exact when the normal cone (inside the affine hull) has dimension at most 3;
    Monte Carlo with ``samples`` Gaussian draws otherwise.
    """
    F = _face_from(P, F)
    if F.dim >= P.dim:
        raise DegenerateFace("exterior angle needs dim F < dim P")
    c = P.dim - F.dim
    if c == 1:
        return 0.5
    local_dir = F.affine_basis @ P.basis.T if F.dim else np.zeros((0, P.dim))
    W = complement_frame(local_dir) if F.dim else np.eye(P.dim)
    Y = P.local
    D = (Y - Y[F.vertex_ids[0]]) @ W.T
    if c == 2:
        return sum(b - a for a, b in arcs_2d(D)) / (2 * math.pi)
    if c == 3:
        facets = P.facets()
        G = np.array([facets[m][0] @ W.T for m in F.facet_ids])
        G /= np.linalg.norm(G, axis=1, keepdims=True)
        return _spherical_polygon_area(G) / (4 * math.pi)
    gen = as_generator(rng if rng is not None else RandomStream(0x5EED, hash(F.vertex_ids) & 0xFFFF))
    D = D[np.linalg.norm(D, axis=1) > TOL]
    hits = 0
    done = 0
    while done < samples:
        m = min(200_000, samples - done)
        Z = gen.standard_normal((m, c))
        hits += int(np.sum(np.all(Z @ D.T <= 0, axis=1)))
        done += m
    return hits / samples


def is_centrally_symmetric(X, tol: float = TOL) -> bool:
    """Whether the point set equals its reflection through its own centroid."""
    if isinstance(X, Polytope):
        X = X.vertices
    X = np.asarray(X, dtype=float)
    c = X.mean(axis=0)
    R = 2 * c - X
    scale = max(1.0, float(np.max(np.abs(X - c))))
    d = np.linalg.norm(R[:, None, :] - X[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol * scale))


def face_vertices(P: Polytope, F) -> np.ndarray:
    F = _face_from(P, F)
    return P.vertices[list(F.vertex_ids)]


def has_centrally_symmetric_k_faces(P: Polytope, k: int):
    """``(all k-faces symmetric, indices of the violating k-faces)``."""
    if not 1 <= k <= max(P.dim, 1):
        raise ValueError(f"k={k} outside 1..{P.dim}")
    bad = [F.index for F in P.lattice().faces(k) if not is_centrally_symmetric(face_vertices(P, F))]
    return (not bad), bad


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    if P.n != Q.n:
        raise DimensionMismatch("Minkowski sum of polytopes in different dimensions")
    pts = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.n)
    return Polytope(pts)


def project(P: Polytope, E: Subspace) -> Polytope:
    if E.ambient_dim != P.n:
        raise DimensionMismatch("subspace and polytope live in different dimensions")
    return Polytope(E.coords(P.vertices))


def support(P: Polytope, x) -> float:
    return float(np.max(P.vertices @ np.asarray(x, dtype=float)))


def support_batch(P: Polytope, U: np.ndarray) -> np.ndarray:
    return np.max(np.asarray(U) @ P.vertices.T, axis=1)


def distance_to_point(P: Polytope, x) -> float:
    """Euclidean distance from ``x`` to ``P`` (least-distance program via NNLS)."""
    x = np.asarray(x, dtype=float)
    r = x - P.origin
    yl = r @ P.basis.T
    off = float(np.sum((r - yl @ P.basis) ** 2))
    d = P.dim
    if d == 0:
        return math.sqrt(float(r @ r))
    if d == 1:
        lo, hi = float(P.local.min()), float(P.local.max())
        inner = max(lo - yl[0], 0.0, yl[0] - hi)
        return math.sqrt(inner * inner + off)
    facets = P.facets()
    A = np.array([a for a, _, _ in facets])
    b = np.array([o for _, o, _ in facets])
    h = A @ yl - b
    if np.all(h <= 0):
        return math.sqrt(off)
    E = np.vstack([-A.T, h[None, :]])
    f = np.zeros(d + 1)
    f[-1] = 1.0
    u, _ = nnls(E, f)
    res = E @ u - f
    z = -res[:d] / res[d]
    return math.sqrt(float(z @ z) + off)


def hausdorff_distance(P: Polytope, Q: Polytope) -> float:
    if P.n != Q.n:
        raise DimensionMismatch("Hausdorff distance between different dimensions")
    a = max(distance_to_point(Q, p) for p in P.vertices)
    b = max(distance_to_point(P, q) for q in Q.vertices)
    return max(a, b)


# --- canonical bodies ---------------------------------------------------------------

def cube(n: int = 3, side: float = 1.0, centered: bool = False) -> Polytope:
    pts = np.array(np.meshgrid(*[[0.0, side]] * n, indexing="ij")).reshape(n, -1).T
    if centered:
        pts = pts - side / 2
    return Polytope(pts)


def box(lengths, origin=None) -> Polytope:
    lengths = np.asarray(lengths, dtype=float)
    n = len(lengths)
    pts = np.array(np.meshgrid(*[[0.0, l] for l in lengths], indexing="ij")).reshape(n, -1).T
    if origin is not None:
        pts = pts + np.asarray(origin, dtype=float)
    return Polytope(pts)


def cross_polytope(n: int = 3, radius: float = 1.0) -> Polytope:
    E = np.eye(n) * radius
    return Polytope(np.vstack([E, -E]))


def octahedron() -> Polytope:
    return cross_polytope(3)


def segment(a, b) -> Polytope:
    return Polytope([a, b])


def zonotope(generators, center=None) -> Polytope:
    """``center + sum_j [-g_j, g_j]``."""
    G = np.array(generators, dtype=float, ndmin=2)
    n = G.shape[1]
    P = Polytope(np.zeros((1, n)))
    for g in G:
        P = minkowski_sum(P, Polytope([g, -g]))
    if center is not None:
        P = P.translate(center)
    return P


def _fibonacci_hemisphere(m: int) -> np.ndarray:
    k = np.arange(m) + 0.5
    z = 1.0 - k / m
    r = np.sqrt(1.0 - z * z)
    th = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(m)
    return np.column_stack([r * np.cos(th), r * np.sin(th), z])


def symmetric_direction_grid(n: int, size: int, seed: int = 0) -> np.ndarray:
    """``size`` unit vectors closed under ``u -> -u`` (first half are line representatives)."""
    half = max(1, size // 2)
    if n == 1:
        U = np.ones((1, 1))
    elif n == 2:
        th = math.pi * (np.arange(half) + 0.5) / half
        U = np.column_stack([np.cos(th), np.sin(th)])
    elif n == 3:
        U = _fibonacci_hemisphere(half)
    else:
        from scipy.stats import norm, qmc

        pts = qmc.Sobol(n, scramble=True, seed=seed).random(half)
        U = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
    return np.vstack([U, -U])


BALL_VERTICES = {2: 128, 3: 128, 4: 256}
RELAX_STEPS = 500


def _relax(H: np.ndarray, steps: int = RELAX_STEPS) -> np.ndarray:
    """Spread antipodal pairs ``+-H`` on the sphere by a fixed number of repulsion steps."""
    m = len(H)
    for _ in range(steps):
        X = np.vstack([H, -H])
        D = H[:, None, :] - X[None, :, :]
        r = np.linalg.norm(D, axis=2)
        r[np.arange(m), np.arange(m)] = np.inf
        F = (D / r[..., None] ** 4).sum(axis=1)
        F -= (F * H).sum(axis=1, keepdims=True) * H
        H = H + 1e-3 * F / np.linalg.norm(F, axis=1).mean()
        H /= np.linalg.norm(H, axis=1, keepdims=True)
    return H


@functools.lru_cache(maxsize=None)
def _ball_points(n: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    size = BALL_VERTICES.get(n, 64 * n)
    U = symmetric_direction_grid(n, size, seed=12345)
    if n >= 4:
        H = _relax(U[: size // 2])
        U = np.vstack([H, -H])
    hull = ConvexHull(U)
    target = _sphere_measure(n - 1)
    # boundary-measure matched: the deficit of the inscribed body is split between
    # width-type and area-type mixed volumes instead of landing on one of them
    s = (target / hull.area) ** (1.0 / (n - 1))
    return U * s


def ball_approximant(n: int) -> Polytope:
    """Fixed centrally symmetric polytope standing in for the unit ball ``B^n``.

    Vertices: a regular polygon (n=2), a symmetrized Fibonacci sphere (n=3), or a
    symmetrized Sobol normal-quantile set relaxed by pairwise repulsion (n>=4), scaled so that the boundary
    measure equals that of ``B^n``.
    """
    return Polytope(_ball_points(n))


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)
