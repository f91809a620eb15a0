"""Even valuations on convex polytopes through their Klain functions.

The package computes mixed and intrinsic volumes, area measures, Radon and
cosine transforms on Grassmannians, decides membership in the classes of
polytopes whose projection functions are cosine transforms of positive
measures, bounds successive radii, and builds a positive valuation with a
negative homogeneous component.
"""
from .errors import *  # noqa: F401,F403
from .estimates import CheckResult, Estimate
from .polytope import (
    Polytope,
    ball_approximant,
    box,
    cross_polytope,
    cube,
    exterior_angle,
    face_lattice,
    minkowski_sum,
    normal_cone,
    octahedron,
    project,
    segment,
    support,
    zonotope,
)
from .subspace import RandomStream, Subspace, cos_angle, line, orthonormalize, perp, sample_incident, sample_uniform, span
from .transforms import AtomicGrassMeasure, GrassFunction, check_adjoint, cosine_transform, radon
from .valuations import (
    ConstantTerm,
    HIntegralTerm,
    IntrinsicTerm,
    MixedVolumeTerm,
    ValuationSpec,
    area_measure,
    evaluate,
    homogeneous_components,
    integrate_against_area_measure,
    intrinsic_volume,
    klain,
    klain_function,
    mixed_volume,
    projection_volume,
    volume,
    volume_polynomial,
)
from .membership import decide_G, representing_measure, shift_to_strict, zonoid_witness
from .radii import circumradius, inradius, perelman_check, radii_chain, successive_radii
from .counterexample import build_counterexample, lempos_constants, minkowski_nondecomposition_check

__version__ = "0.1.0"
