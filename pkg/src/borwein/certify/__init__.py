"""Numeric certification: grid suprema, the beta constants, S_rho, appendix checks."""
from .beta import BetaCertificate, beta, beta_certificate, tail_bound
from .grid import GridCertificate, certified_sup, certified_sup_cells, certified_sup_local
from .maclaurin import maclaurin_alt_bound
from .region import RegionS, sup_kernel_on_region
from .special import erf, gamma_sup_bound, lower_gamma

__all__ = [
    "BetaCertificate", "GridCertificate", "RegionS", "beta", "beta_certificate",
    "certified_sup", "certified_sup_cells", "certified_sup_local", "erf",
    "gamma_sup_bound", "lower_gamma", "maclaurin_alt_bound", "sup_kernel_on_region",
    "tail_bound",
]
