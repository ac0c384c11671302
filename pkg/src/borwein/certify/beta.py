"""Suprema over w > 0 of the erf-normalised perturbed Gaussian integrals.

b_i(w) = w^p / erf(mu sqrt w) * I_i(w) with

    I_1 = int_0^mu e^{-w y^2} (cosh(w y^3) - 1) dy          p = 3/2
    I_2 = int_0^mu y e^{-w y^2} sinh(w y^3) dy              p = 3/2
    I_3 = int_0^mu e^{-w y^2} sinh(w y^4) dy                p = 3/2
    I_4 = int_0^mu y e^{-w y^2} sinh(w y^4) dy              p = 2

beta_i(mu) = sup b_i.  On [0, w0] the supremum comes from a grid plus a
local Lipschitz bound; beyond w0 from the Taylor series of cosh/sinh,
each term bounded through the incomplete gamma function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

from ..errors import DomainError
from .grid import GridCertificate, certified_sup_local
from .special import log_gamma_sup_bound

W0 = 80.0
DEFAULT_M = 10 ** 5
STRICT_M = 10 ** 6
_NODES = 128

# (power of w in front, power of y in front, power of y inside cosh/sinh)
_SHAPE = {1: (1.5, 0, 3), 2: (1.5, 1, 3), 3: (1.5, 0, 4), 4: (2.0, 1, 4)}


@dataclass(frozen=True)
class BetaCertificate:
    i: int
    mu: float
    w0: float
    grid: GridCertificate
    tail_bound: float
    value: float

    def as_dict(self) -> dict:
        return {"i": self.i, "mu": self.mu, "w0": self.w0, "M": self.grid.M,
                "grid_max": self.grid.grid_max, "argmax_w": self.grid.argmax,
                "grid_certified": self.grid.certified_sup,
                "tail_bound": self.tail_bound, "beta": self.value}


@lru_cache(maxsize=16)
def _gauss_nodes(mu: float) -> tuple[np.ndarray, np.ndarray]:
    x, wts = np.polynomial.legendre.leggauss(_NODES)
    return 0.5 * mu * (x + 1.0), 0.5 * mu * wts


def integrand_values(i: int, mu: float, w: np.ndarray) -> np.ndarray:
    """I_i(w) by Gauss-Legendre quadrature (vectorised over w)."""
    _, ya, yb = _SHAPE[i]
    y, wts = _gauss_nodes(mu)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.empty_like(w)
    step = 4096
    for lo in range(0, w.size, step):
        ww = w[lo:lo + step, None]
        s = ww * y ** 2
        t = ww * y ** yb
        # written with e^{t-s} <= 1 so nothing overflows
        if i == 1:
            vals = 0.5 * np.expm1(-t) ** 2 * np.exp(t - s)
        else:
            vals = -0.5 * np.expm1(-2.0 * t) * np.exp(t - s)
        if ya:
            vals = vals * y
        out[lo:lo + step] = vals @ wts
    return out


def b_values(i: int, mu: float, w) -> np.ndarray:
    p = _SHAPE[i][0]
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.zeros_like(w)
    pos = w > 0
    wp = w[pos]
    out[pos] = wp ** p / sp.erf(mu * np.sqrt(wp)) * integrand_values(i, mu, wp)
    return out


def _lipschitz(i: int, mu: float):
    p, ya, _ = _SHAPE[i]
    a = ya
    ibound = mu ** (a + 1) / (a + 1)        # integrand <= y^a
    dbound = mu ** (a + 3) / (a + 3)        # |d/dw integrand| <= y^(a+2)

    def L(lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        x = mu * np.sqrt(hi)
        # erf(x) > x / (1 + x) gives both majorants
        a_hi = hi ** (p - 0.5) * (1.0 + x) / mu
        with np.errstate(divide="ignore"):
            direct = np.where(lo > 0, hi ** p / sp.erf(mu * np.sqrt(np.maximum(lo, 1e-300))), np.inf)
        a_hi = np.minimum(a_hi, direct)
        da = hi ** (p - 1.5) / mu * (p * (1.0 + x) + (1.0 + x) ** 2 / math.sqrt(math.pi))
        return da * ibound + a_hi * dbound

    return L


def _series_terms(i: int):
    """(d, c, F) for the k-th Taylor term, k = first, first+1, ..."""
    if i == 1:
        return 1, lambda k: (3 * k + 0.5, k - 1, math.lgamma(2 * k + 1))
    if i == 2:
        return 0, lambda k: (3 * k + 2.5, k, math.lgamma(2 * k + 2))
    if i == 3:
        return 0, lambda k: (4 * k + 2.5, 2 * k, math.lgamma(2 * k + 2))
    return 0, lambda k: (4 * k + 3.0, 2 * k, math.lgamma(2 * k + 2))


def tail_bound(i: int, mu: float, w0: float = W0) -> float:
    """Upper bound for b_i(w) valid for all w >= w0.

    Term k of the Taylor series is gamma(d, mu^2 w) / (2 F w^c); it is at
    most Gamma(d) / (2 F w0^c) and at most the incomplete-gamma sup bound.
    The sum stops once terms shrink geometrically below 1e-17 and the
    remainder is added as a geometric tail.
    """
    first, term = _series_terms(i)
    total = 0.0
    prev = None
    k = first
    while True:
        d, c, logF = term(k)
        # the trivial bound can overflow for large k; it is then useless anyway
        log_trivial = math.lgamma(d) - logF - c * math.log(w0)
        val = math.exp(log_trivial) / 2.0 if log_trivial < 700 else math.inf
        if c > 0:
            val = min(val, math.exp(log_gamma_sup_bound(c, d, mu * mu) - logF) / 2.0)
        total += val
        if prev is not None and prev > 0 and k > first + 10:
            ratio = val / prev
            if ratio < 0.999 and val < 1e-17 * max(total, 1.0):
                total += val * ratio / (1.0 - ratio)
                break
        if k > 200000:
            raise DomainError("tail series does not settle; mu too close to 1")
        prev = val
        k += 1
    series = total
    if i == 1:
        # closed form of the proof: the k >= 3 terms are below (k+1)/(k-1) x^(k-1)/sqrt(2 pi)
        x = mu * mu
        closed = (math.gamma(3.5) / 4.0 + math.gamma(6.5) / (48.0 * w0)
                  + (x * x / (1.0 - x) + 2.0 * (-math.log1p(-x) - x)) / math.sqrt(2 * math.pi))
        series = min(series, closed)
    return series / math.erf(mu * math.sqrt(w0))


def beta_certificate(i: int, mu: float, M: int = DEFAULT_M, strict: bool = False,
                     w0: float = W0) -> BetaCertificate:
    if i not in _SHAPE:
        raise DomainError("i must be 1, 2, 3 or 4")
    if not 0.0 < mu < 1.0:
        raise DomainError("mu must lie in (0, 1)")
    if strict:
        M = max(M, STRICT_M)
    f = lambda w: b_values(i, mu, w)
    grid = certified_sup_local(f, _lipschitz(i, mu), 0.0, w0, M,
                               target=1e-5 if strict else 1e-4)
    tail = tail_bound(i, mu, w0)
    return BetaCertificate(i, mu, w0, grid, tail, max(grid.certified_sup, tail))


@lru_cache(maxsize=256)
def beta(i: int, mu: float, M: int = DEFAULT_M, strict: bool = False) -> float:
    """Certified upper bound for beta_i(mu)."""
    return beta_certificate(i, mu, M, strict).value
