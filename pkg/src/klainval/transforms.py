"""Monte Carlo Radon and cosine transforms on Grassmannians.

Functions on ``G_i(R^n)`` are :class:`GrassFunction` objects.  All transforms
are sampled with caller-supplied streams; every estimate carries its standard
error, and the identity checks compare two independent sampling routes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadDimension, DimensionMismatch
from .estimates import CheckResult, Estimate
from .subspace import (
    RngLike,
    Subspace,
    as_generator,
    as_stream,
    complement_frame,
    cos_angle,
    orthonormalize,
    perp,
    rotate,
    sample_uniform_batch,
)

DEFAULT_SAMPLES = 100_000


def batch_cos(E_frame: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """``cos(E, F_k)`` for a fixed frame ``E`` and a stack of frames ``(m, i, n)``."""
    M = np.einsum("an,mbn->mab", E_frame, frames)
    return np.abs(np.linalg.det(M))


def batch_perp(frames: np.ndarray) -> np.ndarray:
    m, i, n = frames.shape
    _, _, vt = np.linalg.svd(frames, full_matrices=True)
    return vt[:, i:, :].copy()


@dataclass
class GrassFunction:
    """Real function on ``G_degree(R^n)``.

    ``evaluator`` takes a :class:`Subspace`.  ``batch``, when given, maps a stack
    of frames ``(m, degree, n)`` to ``m`` values and must agree with
    ``evaluator``; it only speeds up sampling.
    """

    n: int
    degree: int
    evaluator: Callable[[Subspace], float]
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __call__(self, E: Subspace) -> float:
        if E.dim != self.degree:
            raise DimensionMismatch(f"function on G_{self.degree} evaluated at a {E.dim}-subspace")
        return float(self.evaluator(E))

    def values(self, frames: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(frames), dtype=float)
        return np.array([self.evaluator(Subspace(f, check=False)) for f in frames])

    def compose_perp(self) -> "GrassFunction":
        """``E -> f(E^perp)`` on ``G_{n - degree}``."""
        base = self

        def ev(E):
            return base.evaluator(perp(E))

        def bt(frames):
            return base.values(batch_perp(frames))

        return GrassFunction(self.n, self.n - self.degree, ev, bt)

    def rotated(self, Q: np.ndarray) -> "GrassFunction":
        """``E -> f(Q E)``."""
        base = self

        def ev(E):
            return base.evaluator(rotate(E, Q))

        def bt(frames):
            return base.values(frames @ Q.T)

        return GrassFunction(self.n, self.degree, ev, bt)

    @classmethod
    def constant(cls, n: int, degree: int, value: float = 1.0) -> "GrassFunction":
        return cls(n, degree, lambda E: value, lambda fr: np.full(len(fr), float(value)))

    @classmethod
    def cos_power(cls, F: Subspace, power: float = 1.0) -> "GrassFunction":
        """``E -> cos(E, F)**power``."""
        return cls(
            F.ambient_dim,
            F.dim,
            lambda E: cos_angle(E, F) ** power,
            lambda fr: batch_cos(F.frame, fr) ** power,
        )


def sample_incident_batch(F: Subspace, i: int, count: int, rng: RngLike) -> np.ndarray:
    """``count`` draws from the invariant probability measure on ``G_i^F``."""
    n, j = F.ambient_dim, F.dim
    if not 0 < i < n:
        raise BadDimension(f"need 0 < i < n, got i={i}, n={n}")
    if i == j:
        return np.repeat(F.frame[None], count, axis=0)
    gen = as_generator(rng)
    if i < j:
        inner = sample_uniform_batch(j, i, count, gen)
        return inner @ F.frame
    comp = complement_frame(F.frame)
    if i - j == n - j:
        extra = np.repeat(comp[None], count, axis=0)
    else:
        extra = sample_uniform_batch(n - j, i - j, count, gen) @ comp
    return np.concatenate([np.repeat(F.frame[None], count, axis=0), extra], axis=1)


def radon(f: GrassFunction, F: Subspace, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> Estimate:
    """``R_{j,i} f(F)``: average of ``f`` over subspaces incident to ``F``."""
    if F.ambient_dim != f.n:
        raise DimensionMismatch("function and subspace live in different dimensions")
    if f.degree == F.dim:
        return Estimate.exact(f(F))
    frames = sample_incident_batch(F, f.degree, samples, rng)
    return Estimate.from_samples(f.values(frames))


class AtomicGrassMeasure:
    """Finite signed measure ``sum_k w_k delta_{E_k}`` on ``G_i(R^n)``."""

    def __init__(self, atoms):
        atoms = [(E, float(w)) for E, w in atoms]
        dims = {E.dim for E, _ in atoms}
        ns = {E.ambient_dim for E, _ in atoms}
        if len(dims) > 1 or len(ns) > 1:
            raise DimensionMismatch("atoms of mixed dimension")
        if not all(np.isfinite(w) for _, w in atoms):
            raise ValueError("non-finite atom weight")
        self.atoms = atoms

    @property
    def dim(self) -> int:
        return self.atoms[0][0].dim

    @property
    def n(self) -> int:
        return self.atoms[0][0].ambient_dim

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def total_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def total_variation(self) -> float:
        return float(sum(abs(w) for _, w in self.atoms))

    def scaled(self, t: float) -> "AtomicGrassMeasure":
        return AtomicGrassMeasure([(E, t * w) for E, w in self.atoms])

    def __add__(self, other: "AtomicGrassMeasure") -> "AtomicGrassMeasure":
        return AtomicGrassMeasure(self.atoms + other.atoms)

    def perp(self) -> "AtomicGrassMeasure":
        return AtomicGrassMeasure([(perp(E), w) for E, w in self.atoms])

    def integrate(self, f: Callable[[Subspace], float]) -> float:
        return float(sum(w * f(E) for E, w in self.atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def to_json(self) -> dict:
        if not self.atoms:
            return {"n": None, "dim": None, "atoms": []}
        return {
            "n": self.n,
            "dim": self.dim,
            "atoms": [{"frame": E.frame.tolist(), "w": w} for E, w in self.atoms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AtomicGrassMeasure":
        return cls([(orthonormalize(a["frame"]), a["w"]) for a in obj["atoms"]])

    def __repr__(self) -> str:
        if not self.atoms:
            return "AtomicGrassMeasure([])"
        return f"AtomicGrassMeasure(n={self.n}, dim={self.dim}, atoms={len(self.atoms)})"


@dataclass
class RadonPushforward:
    """``R_{j,i} mu`` for an atomic ``mu`` on ``G_i``, acting on functions on ``G_j``."""

    measure: AtomicGrassMeasure
    target_dim: int

    def total_mass(self) -> float:
        return self.measure.total_mass()

    def integrate(self, g: GrassFunction, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> Estimate:
        if g.degree != self.target_dim:
            raise DimensionMismatch("test function lives on the wrong Grassmannian")
        streams = as_stream(rng).split(len(self.measure))
        value, var = 0.0, 0.0
        for k, (E, w) in enumerate(self.measure.atoms):
            est = radon(g, E, samples, streams[k])
            value += w * est.value
            var += (w * est.stderr) ** 2
        return Estimate(value, float(np.sqrt(var)), samples * len(self.measure))


def radon_measure(mu: AtomicGrassMeasure, j: int) -> RadonPushforward:
    if not 0 < j < mu.n:
        raise BadDimension(f"target dimension {j} outside (0, {mu.n})")
    return RadonPushforward(mu, j)


def cosine_transform(f, E: Subspace, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> Estimate:
    """``C_i f(E)`` (sampled) or ``C_i mu(E)`` (exact finite sum for atomic ``mu``)."""
    if isinstance(f, AtomicGrassMeasure):
        if len(f) and f.dim != E.dim:
            raise DimensionMismatch("measure and subspace dimensions differ")
        return Estimate.exact(sum(w * cos_angle(E, F) for F, w in f.atoms))
    if f.degree != E.dim or f.n != E.ambient_dim:
        raise DimensionMismatch("function and subspace dimensions differ")
    frames = sample_uniform_batch(f.n, f.degree, samples, rng)
    return Estimate.from_samples(batch_cos(E.frame, frames) * f.values(frames))


def check_adjoint(f: GrassFunction, g: GrassFunction, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> CheckResult:
    """``(R_{j,i} f, g)`` against ``(f, R_{i,j} g)``, each by its own sampling route."""
    if f.n != g.n:
        raise DimensionMismatch("functions on different ambient spaces")
    n, i, j = f.n, f.degree, g.degree
    stream = as_stream(rng)
    s1, s2 = stream.split(2)
    gen1, gen2 = s1.generator(), s2.generator()
    # route 1: F uniform on G_j, then E uniform among subspaces incident to F
    Fs = sample_uniform_batch(n, j, samples, gen1)
    Es = _incident_stack(Fs, i, gen1)
    lhs = Estimate.from_samples(f.values(Es) * g.values(Fs))
    # route 2: E uniform on G_i, then F incident to E
    Es2 = sample_uniform_batch(n, i, samples, gen2)
    Fs2 = _incident_stack(Es2, j, gen2)
    rhs = Estimate.from_samples(f.values(Es2) * g.values(Fs2))
    return CheckResult.compare(lhs, rhs)


def _incident_stack(frames: np.ndarray, i: int, gen) -> np.ndarray:
    """One incident ``i``-subspace per frame in the stack."""
    m, j, n = frames.shape
    if i == j:
        return frames.copy()
    if i < j:
        inner = sample_uniform_batch(j, i, m, gen)
        return np.einsum("mab,mbn->man", inner, frames)
    comp = batch_perp(frames)
    if i == n:
        raise BadDimension("i must be < n")
    if i - j == n - j:
        extra = comp
    else:
        inner = sample_uniform_batch(n - j, i - j, m, gen)
        extra = np.einsum("mab,mbn->man", inner, comp)
    return np.concatenate([frames, extra], axis=1)


def check_radon_composition(
    f: GrassFunction, F: Subspace, mid: int, samples: int = DEFAULT_SAMPLES, rng: RngLike = None
) -> CheckResult:
    """``R_{k,i} f(F)`` directly against ``R_{k,j}(R_{j,i} f)(F)`` through ``mid = j``."""
    i, k = f.degree, F.dim
    if not (min(i, k) <= mid <= max(i, k)):
        raise BadDimension("intermediate dimension must lie between the end dimensions")
    stream = as_stream(rng)
    s1, s2 = stream.split(2)
    direct = radon(f, F, samples, s1)
    gen = s2.generator()
    mids = sample_incident_batch(F, mid, samples, gen)
    Es = _incident_stack(mids, i, gen)
    two_step = Estimate.from_samples(f.values(Es))
    return CheckResult.compare(direct, two_step)


def check_cos_perp_duality(f: GrassFunction, E: Subspace, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> CheckResult:
    """``(C_i f)(E)`` against ``(C_{n-i}(f o perp))(E^perp)``."""
    stream = as_stream(rng)
    s1, s2 = stream.split(2)
    lhs = cosine_transform(f, E, samples, s1)
    rhs = cosine_transform(f.compose_perp(), perp(E), samples, s2)
    return CheckResult.compare(lhs, rhs)


def check_self_adjoint(f: GrassFunction, g: GrassFunction, samples: int = DEFAULT_SAMPLES, rng: RngLike = None) -> CheckResult:
    """``(C_i f, g)`` against ``(f, C_i g)`` from independent pairs of subspaces."""
    if f.degree != g.degree or f.n != g.n:
        raise DimensionMismatch("self-adjointness needs functions on the same Grassmannian")
    n, i = f.n, f.degree
    stream = as_stream(rng)
    s1, s2 = stream.split(2)
    out = []
    for s, swap in ((s1, False), (s2, True)):
        gen = s.generator()
        A = sample_uniform_batch(n, i, samples, gen)
        B = sample_uniform_batch(n, i, samples, gen)
        c = np.abs(np.linalg.det(np.einsum("man,mbn->mab", A, B)))
        if not swap:
            out.append(Estimate.from_samples(c * f.values(B) * g.values(A)))
        else:
            out.append(Estimate.from_samples(c * f.values(A) * g.values(B)))
    return CheckResult.compare(out[0], out[1])


def check_intertwining(
    f: GrassFunction, F: Subspace, target_dim: int, Q: np.ndarray, samples: int = DEFAULT_SAMPLES, rng: RngLike = None
) -> CheckResult:
    """``R f(Q F)`` against ``R(f o Q)(F)`` for an orthogonal ``Q``."""
    if F.dim != target_dim:
        raise BadDimension("F must lie in the target Grassmannian")
    stream = as_stream(rng)
    s1, s2 = stream.split(2)
    lhs = radon(f, rotate(F, Q), samples, s1)
    rhs = radon(f.rotated(Q), F, samples, s2)
    return CheckResult.compare(lhs, rhs)


def cosine_l2_norms(f: GrassFunction, outer: int = 400, inner: int = 2000, rng: RngLike = None):
    """Sampled ``(||C_i f||_2, ||f||_2)``; the first never exceeds the second."""
    gen = as_generator(rng)
    Es = sample_uniform_batch(f.n, f.degree, outer, gen)
    Fs = sample_uniform_batch(f.n, f.degree, inner, gen)
    fv = f.values(Fs)
    cf = np.array([np.mean(batch_cos(E, Fs) * fv) for E in Es])
    return float(np.sqrt(np.mean(cf**2))), float(np.sqrt(np.mean(fv**2)))
