"""Conditionally exactly solvable potentials from supersymmetric deformations."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .construction import (ConditionReport, Deformation, SpectralLine, admissibility_check,
                           ces_potential, fundamental_u, riccati_residual, spectrum_minus)
from .families import FAMILIES, DeformationParams, get_family, seed_phi, special_case_u, spectrum_plus
from .susy import SusyType, Superpotential, classify_susy, partner_potentials
from .verifier import Discretization, compare_spectra, numeric_spectrum, verify

__all__ = [
    "ConditionReport", "Deformation", "DeformationParams", "Discretization", "FAMILIES",
    "SpectralLine", "Superpotential", "SusyType", "admissibility_check", "ces_potential",
    "classify_susy", "compare_spectra", "fundamental_u", "get_family", "numeric_spectrum",
    "partner_potentials", "riccati_residual", "seed_phi", "special_case_u", "spectrum_minus",
    "spectrum_plus", "verify", "__version__",
]
