"""Orthonormal frames, Grassmannian elements and sampling on Grassmannians.

A :class:`Subspace` is an element of the Grassmannian ``G_i(R^n)`` stored as an
``(i, n)`` array whose rows form an orthonormal basis.  Every quantity derived
from a subspace is required to be independent of the particular frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BadDimension, DimensionMismatch, RankDeficient

ORTHO_TOL = 1e-12
RANK_TOL = 1e-10
GEOM_TOL = 1e-9


@dataclass(frozen=True)
class RandomStream:
    """Reproducible source of random draws identified by ``(seed, counter)``.

    The stream is a value: passing the same stream twice yields the same draws.
    Disjoint streams for concurrent work are obtained with :meth:`split`.
    """

    seed: int
    counter: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, self.counter])))

    def advance(self, k: int = 1) -> "RandomStream":
        return RandomStream(self.seed, self.counter + k)

    def split(self, k: int) -> list["RandomStream"]:
        # children live in a counter range far away from ``advance`` neighbours
        base = (self.counter + 1) << 20
        return [RandomStream(self.seed, base + j) for j in range(k)]


RngLike = Union[RandomStream, np.random.Generator, int, None]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    if rng is None:
        rng = 0
    return RandomStream(int(rng)).generator()


def as_stream(rng: RngLike) -> RandomStream:
    """A :class:`RandomStream` for ``rng``; generators contribute a seed drawn from them."""
    if isinstance(rng, RandomStream):
        return rng
    if isinstance(rng, np.random.Generator):
        return RandomStream(int(rng.integers(2**62)))
    return RandomStream(0 if rng is None else int(rng))


class Subspace:
    """Linear subspace of R^n of dimension ``0 < dim < n`` with an orthonormal frame."""

    __slots__ = ("frame", "_projector")

    def __init__(self, frame, *, check: bool = True):
        frame = np.array(frame, dtype=float, ndmin=2)
        if check:
            k, n = frame.shape
            if not 0 < k < n:
                raise BadDimension(f"subspace dimension {k} not in (0, {n})")
            gram = frame @ frame.T
            if np.max(np.abs(gram - np.eye(k))) > ORTHO_TOL * 10:
                raise ValueError("frame is not orthonormal; use orthonormalize()")
        self.frame = frame
        self.frame.setflags(write=False)
        self._projector = None

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[1]

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def projector(self) -> np.ndarray:
        if self._projector is None:
            self._projector = self.frame.T @ self.frame
        return self._projector

    def coords(self, x) -> np.ndarray:
        """Coordinates of points ``x`` (rows) with respect to the frame."""
        return np.asarray(x, dtype=float) @ self.frame.T

    def lift(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.frame

    def contains(self, x, tol: float = GEOM_TOL) -> bool:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        resid = x - x @ self.projector
        return bool(np.all(np.linalg.norm(resid, axis=1) <= tol * np.maximum(1.0, np.linalg.norm(x, axis=1))))

    def same_as(self, other: "Subspace", tol: float = GEOM_TOL) -> bool:
        return self.dim == other.dim and projector_distance(self, other) < tol

    def to_json(self) -> dict:
        return {"n": self.ambient_dim, "dim": self.dim, "frame": self.frame.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Subspace":
        frame = np.asarray(obj["frame"], dtype=float)
        if frame.ndim != 2 or frame.shape != (obj["dim"], obj["n"]):
            raise DimensionMismatch(f"frame shape {frame.shape} does not match dim={obj['dim']}, n={obj['n']}")
        return orthonormalize(frame)

    def __repr__(self) -> str:
        return f"Subspace(n={self.ambient_dim}, dim={self.dim})"


def projector_distance(E: Subspace, F: Subspace) -> float:
    return float(np.linalg.norm(E.projector - F.projector, ord=2))


def orthonormalize(vectors: Sequence) -> Subspace:
    """Orthonormal frame spanning the given linearly independent vectors."""
    try:
        A = np.array(vectors, dtype=float)
    except ValueError as exc:
        raise DimensionMismatch("vectors have mixed lengths") from exc
    if A.ndim != 2:
        raise DimensionMismatch("vectors have mixed lengths")
    sv = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(np.max(np.linalg.norm(A, axis=1))))
    if sv.size < A.shape[0] or sv[-1] <= RANK_TOL * scale:
        raise RankDeficient("vectors are linearly dependent")
    q, _ = np.linalg.qr(A.T)
    return Subspace(q.T.copy())


def complement_frame(frame: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the orthogonal complement of the row space of ``frame``."""
    frame = np.atleast_2d(frame)
    k, n = frame.shape
    _, _, vt = np.linalg.svd(frame, full_matrices=True)
    return vt[k:].copy()


def perp(E: Subspace) -> Subspace:
    return Subspace(complement_frame(E.frame), check=False)


def cos_angle(E: Subspace, F: Subspace) -> float:
    """Volume distortion factor of orthogonal projection from ``F`` onto ``E``."""
    if E.dim != F.dim or E.ambient_dim != F.ambient_dim:
        raise DimensionMismatch(f"cos_angle needs equal dimensions, got {E!r} and {F!r}")
    value = abs(float(np.linalg.det(E.frame @ F.frame.T)))
    return min(value, 1.0)


def line(u) -> Subspace:
    """One-dimensional subspace spanned by ``u``."""
    return orthonormalize([u])


def span(*vectors) -> Subspace:
    return orthonormalize(list(vectors))


def coordinate_subspace(n: int, axes: Sequence[int]) -> Subspace:
    return Subspace(np.eye(n)[list(axes)])


def _random_frame(gen: np.random.Generator, n: int, k: int) -> np.ndarray:
    g = gen.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    # sign fix makes the frame Haar distributed rather than QR-convention biased
    q = q * np.sign(np.diag(r))
    return q.T.copy()


def sample_uniform(n: int, i: int, rng: RngLike) -> Subspace:
    if not 0 < i < n:
        raise BadDimension(f"need 0 < i < n, got i={i}, n={n}")
    return Subspace(_random_frame(as_generator(rng), n, i), check=False)


def sample_uniform_batch(n: int, i: int, count: int, rng: RngLike) -> np.ndarray:
    """``count`` Haar-random frames as an array of shape ``(count, i, n)``."""
    if not 0 < i < n:
        raise BadDimension(f"need 0 < i < n, got i={i}, n={n}")
    gen = as_generator(rng)
    g = gen.standard_normal((count, n, i))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    q = q * signs[:, None, :]
    return np.transpose(q, (0, 2, 1)).copy()


def sample_incident(F: Subspace, i: int, rng: RngLike) -> Subspace:
    """Draw from the rotation-invariant probability measure on subspaces incident to ``F``.

    For ``i < dim F`` the result lies inside ``F``; for ``i > dim F`` it contains
    ``F``; for ``i == dim F`` the only incident subspace is ``F`` itself.
    """
    n, j = F.ambient_dim, F.dim
    if not 0 < i < n:
        raise BadDimension(f"need 0 < i < n, got i={i}, n={n}")
    if i == j:
        return F
    gen = as_generator(rng)
    if i < j:
        inner = _random_frame(gen, j, i)
        return Subspace(inner @ F.frame, check=False)
    comp = complement_frame(F.frame)
    extra = _random_frame(gen, n - j, i - j) @ comp
    return Subspace(np.vstack([F.frame, extra]), check=False)


def random_unit_vectors(gen: np.random.Generator, count: int, n: int) -> np.ndarray:
    x = gen.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_rotation(n: int, rng: RngLike) -> np.ndarray:
    gen = as_generator(rng)
    q, r = np.linalg.qr(gen.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def rotate(E: Subspace, Q: np.ndarray) -> Subspace:
    """Image of ``E`` under the orthogonal map ``x -> Q x``."""
    return Subspace(E.frame @ Q.T, check=False)
