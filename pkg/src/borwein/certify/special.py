"""erf and the lower incomplete gamma function.

Both are thin wrappers: math.erf / scipy.special carry full double
accuracy.  The wrappers add the domain checks and array handling the
rest of the package relies on.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from ..errors import DomainError


def erf(x):
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return _sp.erf(np.asarray(x, dtype=float))


def lower_gamma(s: float, a):
    """gamma(s, a) = int_0^a e^{-x} x^{s-1} dx for s > 0, a >= 0."""
    if s <= 0:
        raise DomainError("lower_gamma needs s > 0")
    if np.any(np.asarray(a) < 0):
        raise DomainError("lower_gamma needs a >= 0")
    val = _sp.gammainc(s, a) * math.gamma(s) if s < 171 else np.exp(
        np.log(_sp.gammainc(s, a)) + _sp.gammaln(s))
    return float(val) if np.ndim(a) == 0 else val


def gamma_sup_bound(c: float, d: float, mu: float) -> float:
    """Upper bound mu^c Gamma(d-c+1) / (c sqrt(2 pi (d-c))) for sup_w w^-c gamma(d, mu w)."""
    return math.exp(log_gamma_sup_bound(c, d, mu))


def log_gamma_sup_bound(c: float, d: float, mu: float) -> float:
    if not (c > 0 and d > c and mu > 0):
        raise DomainError("need c > 0, d > c, mu > 0")
    return (c * math.log(mu) + math.lgamma(d - c + 1)
            - math.log(c * math.sqrt(2 * math.pi * (d - c))))
