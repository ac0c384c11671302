"""Borwein-type polynomials: exact coefficients, sign checks and the analytic bounds."""
from .errors import (BorweinError, ContractError, DomainError, InvalidSpecError, PreconditionError,
                     ResourceError, SingularityError, UnsupportedCaseError)
from .qseries import (INFINITE, Factor, ProductSpec, TruncatedSeries, borwein_poly, borwein_spec,
                      general_product, modk_spec, paired_spec)

__version__ = "0.1.0"

__all__ = [
    "BorweinError", "ContractError", "DomainError", "InvalidSpecError", "PreconditionError",
    "ResourceError", "SingularityError", "UnsupportedCaseError", "INFINITE", "Factor",
    "ProductSpec", "TruncatedSeries", "borwein_poly", "borwein_spec", "general_product",
    "modk_spec", "paired_spec",
]
