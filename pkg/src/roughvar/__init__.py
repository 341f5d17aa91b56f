"""Rough-path regularity toolkit: signatures, generalized variation, Gauss tails."""

from . import experiments, gaussian, nilpotent, regularity, tails, translation, variation
from .gaussian import (
    RngSeed,
    brownian_model,
    enhance_to_rough_path,
    fbm_model,
    model_from_name,
    sample_bm,
    sample_fbm,
)
from .nilpotent import (
    GroupPath,
    TensorGroupElement,
    cc_distance,
    dilate,
    homogeneous_norm,
    identity,
    inverse,
    levy_area_increment,
    lift_piecewise_linear,
    multiply,
)
from .regularity import RegularityFunction, compose_with_sqrt, phi, power, psi
from .tails import GaussianSurrogate, TailReport, fit_tail
from .translation import translate, translation_bound_ratio, young_cross_integrals
from .variation import (
    ControlFunction,
    DissectionValue,
    SampledPath,
    covariance_rho_variation,
    holder_norm,
    mesh_limited_variation,
    oscillation,
    psi_variation,
    psi_variation_bruteforce,
    psi_variation_norm,
    superadditivity_check,
)

__version__ = "0.1.0"
