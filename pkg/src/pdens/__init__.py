"""Exact local densities, tangent cones and Crofton integrals for sets over Q_p."""
from .cells import Cell1D, Set1D, normalize_1d
from .cone import (ConeWithMultiplicity, distinguished_check, nu_specialization, sc_cross_check,
                   sc_multiplicity, tangent_cone, theorem_mt_check)
from .crofton import (ProjectiveLine, crofton_integral, crofton_monte_carlo, direct_image,
                      invariant_cell_measure, verify_crofton)
from .density import StepFunction, density, local_density, volume_on_ball, volume_on_sphere
from .dsl import parse, print_document, run
from .epseq import EPSequence
from .padic import PadicNumber, Subgroup
from .sets import BoxSet, MonomialGraph, Ray, RayCone, UnionSet

__all__ = [
    "BoxSet", "Cell1D", "ConeWithMultiplicity", "EPSequence", "MonomialGraph", "PadicNumber",
    "ProjectiveLine", "Ray", "RayCone", "Set1D", "StepFunction", "Subgroup", "UnionSet",
    "crofton_integral", "crofton_monte_carlo", "density", "direct_image", "distinguished_check",
    "invariant_cell_measure", "local_density", "normalize_1d", "nu_specialization", "parse",
    "print_document", "run", "sc_cross_check", "sc_multiplicity", "tangent_cone",
    "theorem_mt_check", "verify_crofton", "volume_on_ball", "volume_on_sphere",
]
