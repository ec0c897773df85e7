"""Verification laboratory for an isospectral-deformation spectral triple
with an oscillator Dirac operator: star-product calculus, Fock-basis
oracles, heat-trace functionals, residues and a gauge/Higgs action."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    NumericalInstabilityError,
    ParameterError,
    UnsupportedProductError,
)

__all__ = [
    "DomainError",
    "NumericalInstabilityError",
    "ParameterError",
    "UnsupportedProductError",
    "__version__",
]
