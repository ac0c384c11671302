"""Peak and tail error bounds, argument control and the threshold m*(n).

Everything here is about the power Q = P_n^delta on the circle |q| = r
with r solving the frozen-argument saddle equation.  A coefficient has
the predicted sign as soon as eps0 + eps1 stays below the cosine floor.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from . import saddle
from .certify.beta import beta
from .errors import DomainError, PreconditionError, UnsupportedCaseError

ANALYTIC_MIN_N = 400
MONOTONE_MIN_N = 547
# constants of the closed-form peak bound
PEAK_A, PEAK_B, PEAK_C, PEAK_D = 146.2, 6.46, 0.124, 7.222
RHO_LO, RHO_HI = 10.0 / 81.0, 4.0


class AnalyticBoundInsufficient(UnsupportedCaseError):
    """No radius in (r0, 1] satisfies the final inequality."""


@dataclass(frozen=True)
class GaussianApproxInputs:
    f1: float
    f2: complex
    f3: float
    f4: float
    g: float
    x0: float
    mu3: float
    mu4: float

    @classmethod
    def build(cls, f1, f2, f3, f4, x0, g=None) -> "GaussianApproxInputs":
        g = -complex(f2).real if g is None else g
        if not g > 0:
            raise PreconditionError("g must be positive")
        mu3 = x0 * f3 / (3 * g)
        mu4 = x0 * math.sqrt(f4 / (8 * g))
        return cls(float(f1), complex(f2), float(f3), float(f4), float(g), float(x0), mu3, mu4)


@dataclass(frozen=True)
class ErrorBudget:
    eps0: float
    eps1: float
    cos_floor: float
    margin: float
    verdict: bool
    r: float | None = None

    @classmethod
    def make(cls, eps0, eps1, floor, r=None) -> "ErrorBudget":
        margin = floor - eps0 - eps1
        return cls(float(eps0), float(eps1), float(floor), float(margin), bool(margin > 0), r)

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# the Gaussian approximation lemma

def gaussian_error_bound(inp: GaussianApproxInputs, M: int | None = None) -> float:
    """Five-term bound times cosh(f1 x0) (the erf factor cancels in eps0).

    A term whose f3 (or f4) vanishes drops out, and then its mu is not
    needed; otherwise mu3, mu4 must lie in (0, 1).
    """
    g = inp.g
    if not g > 0:
        raise PreconditionError("g must be positive")
    kw = {} if M is None else {"M": M}
    total = (abs(inp.f2.imag) + inp.f1 ** 2) / (2 * g)
    sp = math.sqrt(math.pi)
    if inp.f3 > 0:
        if not 0 < inp.mu3 < 1:
            raise PreconditionError(f"mu3 = {inp.mu3:.4g} outside (0, 1); shrink x0")
        total += 4 * inp.f3 ** 2 * beta(1, inp.mu3, **kw) / (9 * sp * g ** 3)
        total += 4 * inp.f1 * inp.f3 * beta(2, inp.mu3, **kw) / (3 * sp * g ** 2)
    if inp.f4 > 0:
        if not 0 < inp.mu4 < 1:
            raise PreconditionError(f"mu4 = {inp.mu4:.4g} outside (0, 1); shrink x0")
        total += inp.f4 * beta(3, inp.mu4, **kw) / (3 * sp * g ** 2)
        total += math.sqrt(2) * inp.f1 * inp.f4 * beta(4, inp.mu4, **kw) / (3 * sp * g ** 2.5)
    return math.cosh(inp.f1 * inp.x0) * total


def _check_radius(n: int, r: float, delta: int) -> None:
    if delta not in (1, 2, 3):
        raise DomainError("delta must be 1, 2 or 3")
    if not 0 < r <= 1:
        raise DomainError("need 0 < r <= 1")
    if r < saddle.r_floor(n, delta):
        raise DomainError(f"r = {r} below the radius floor r0 = {saddle.r_floor(n, delta)}")


def fj_bounds(n: int, r: float, delta: int = 1) -> GaussianApproxInputs:
    """Worst-case derivative constants from the X_j sums, g at its lower bound."""
    if n < ANALYTIC_MIN_N:
        raise DomainError(f"derivative bounds need n >= {ANALYTIC_MIN_N}")
    _check_radius(n, r, delta)
    x = [saddle.X(j, n, r) for j in range(5)]
    g = delta * x[2] / 3
    f2 = complex(-g, delta * x[1] / 3)
    return GaussianApproxInputs.build(
        7 / 40 * delta * x[0], f2, 2 / 3 * delta * x[3], 18 / 25 * delta * x[4],
        saddle.cutoff_theta0(n, r), g)


def peak_error_bound(n: int, r: float, delta: int = 1) -> float:
    """Closed-form upper bound for eps0 (decreasing in r)."""
    if n < ANALYTIC_MIN_N:
        raise DomainError(f"peak bound needs n >= {ANALYTIC_MIN_N}")
    _check_radius(n, r, delta)
    x1, x2 = saddle.X(1, n, r), saddle.X(2, n, r)
    return (PEAK_A / delta + PEAK_B + PEAK_C * delta) * x1 / x2 + PEAK_D / math.sqrt(delta * x2)


def peak_error_audit(n: int, r: float, delta: int = 1, M: int | None = None) -> dict:
    """Recompose eps0 from the Gaussian lemma with the derivative bounds.

    The closed form should dominate the recomposed value.
    """
    inp = fj_bounds(n, r, delta)
    terms = gaussian_error_bound(inp, M)
    closed = peak_error_bound(n, r, delta)
    return {"n": n, "r": r, "delta": delta, "mu3": inp.mu3, "mu4": inp.mu4,
            "recomposed": 2 * terms, "closed_form": closed,
            "closed_dominates": bool(closed >= 2 * terms)}


def _phi(n: int, r: float, rho: float) -> float:
    shape = 1 - math.sqrt(1 / (1 + 18 * rho * rho))
    return r ** 3 * (1 + r ** 3) / 6 * shape * saddle._ratio(n / 2, 3, r)


def tail_error_bound(n: int, r: float, delta: int = 1) -> float:
    """Upper bound for eps1; the rho-integral is done by adaptive quadrature."""
    _check_radius(n, r, delta)
    lr0 = math.sqrt(4 * delta / (27 * n))        # -log r0
    if math.sqrt(3) - (1 + 3 * RHO_HI) * lr0 <= 0:
        raise DomainError("n too small for the tail bound")
    span = saddle._ratio(3 * n, 3, r)            # (1 - r^{3n}) / (1 - r^3)

    def integrand(rho):
        return math.exp(0.8 * delta / (math.sqrt(3) - (1 + 3 * rho) * lr0) - delta * _phi(n, r, rho))

    body = integrate.quad(integrand, RHO_LO, RHO_HI, epsabs=1e-12, epsrel=1e-12)[0]
    inner = 4 * math.sqrt(span) * body + 2 * math.pi * span ** 1.5 * math.exp(
        5.44 * delta - delta * _phi(n, r, RHO_HI))
    lead = math.sqrt(54 * delta / (5 * math.pi)) / math.erf(math.sqrt(40 * delta * span / 243))
    return lead * inner


# ---------------------------------------------------------------------------
# argument of P_n(r e^{2 pi i/3})

def _f_arg(r: float, x: np.ndarray) -> np.ndarray:
    rx = np.exp(x * math.log(r))
    return -np.arctan(math.sqrt(3) * rx / (rx + 2))


def arg_exact(n: int, r: float) -> float:
    """arg P_n(r e^{2 pi i/3}) as the sum of per-factor arguments.

    Each pair of factors is combined with arctan a - arctan b =
    arctan((a - b) / (1 + a b)) so the terms stay accurate near r = 1.
    """
    if not 0 < r <= 1:
        raise DomainError("need 0 < r <= 1")
    if r == 1.0:
        return 0.0
    lr = math.log(r)
    k = np.arange(1, n + 1, dtype=float)
    lo = np.exp((3 * k - 2) * lr)      # r^(3k-2)
    hi = lo * r                        # r^(3k-1)
    s3 = math.sqrt(3)
    a = s3 * lo / (lo + 2)
    b = s3 * hi / (hi + 2)
    diff = -2 * s3 * lo * math.expm1(lr) / ((lo + 2) * (hi + 2))   # a - b > 0
    return -math.fsum(np.arctan(diff / (1 + a * b)))


def arg_approx(n: int, r: float) -> float:
    if not 0 < r <= 1:
        raise DomainError("need 0 < r <= 1")
    s = r ** (3 * n)
    return -math.pi / 18 + math.atan(math.sqrt(3) * s / (2 + s)) / 3


def cos_floor(delta: int, m: int) -> float:
    """Lower bound for |2 cos(arg Q - 2 m pi/3)| over the admissible arguments."""
    if delta == 1:
        return 2 * min(0.5, math.cos(7 * math.pi / 18))
    if delta == 2:
        return 2 * math.cos(4 * math.pi / 9)
    if delta == 3:
        if m % 3 == 2:
            raise UnsupportedCaseError("residue 2 has no positive floor for delta = 3")
        return 1.0
    raise DomainError("delta must be 1, 2 or 3")


def cos_floor_at(n: int, r: float, delta: int, m: int | None = None) -> float:
    """The same floor using the actual argument at radius r.

    With m given it is |2 cos(delta*arg - 2 m pi/3)|; without m it is the
    minimum over the residues the theorem covers.
    """
    a = delta * arg_exact(n, r)
    if m is not None:
        if delta == 3 and m % 3 == 2:
            raise UnsupportedCaseError("residue 2 has no positive floor for delta = 3")
        return abs(2 * math.cos(a - 2 * m * math.pi / 3))
    residues = (0, 1) if delta == 3 else (0, 1, 2)
    return min(abs(2 * math.cos(a - 2 * k * math.pi / 3)) for k in residues)


def final_inequality(n: int, m: int, delta: int = 1, exact_arg: bool = False) -> ErrorBudget:
    """eps0 + eps1 against the cosine floor at r = r(n, m, delta)."""
    if n < max(ANALYTIC_MIN_N, MONOTONE_MIN_N):
        raise DomainError(f"final inequality needs n >= {MONOTONE_MIN_N}")
    if not 3 * n <= m <= delta * 3 * n * n / 2:
        raise DomainError("need 3n <= m <= delta * deg / 2")
    r = saddle.solve_radius(n, m, delta)
    floor = cos_floor_at(n, r, delta, m) if exact_arg else cos_floor(delta, m)
    return ErrorBudget.make(peak_error_bound(n, r, delta), tail_error_bound(n, r, delta), floor, r)


def _margin_at(n: int, r: float, delta: int) -> float:
    return cos_floor_at(n, r, delta) - peak_error_bound(n, r, delta) - tail_error_bound(n, r, delta)


def rstar(n: int, delta: int, tol: float = 1e-10) -> float:
    """Smallest radius in (r0, 1] from which the final inequality holds.

    Both error bounds decrease in r and the floor increases, so the margin
    is increasing and bisection applies.
    """
    if n < MONOTONE_MIN_N:
        raise DomainError(f"m* needs n >= {MONOTONE_MIN_N}")
    r0 = saddle.r_floor(n, delta)
    if _margin_at(n, 1.0, delta) <= 0:
        raise AnalyticBoundInsufficient(f"analytic bound insufficient for n={n}, delta={delta}")
    lo, hi = r0, 1.0
    if _margin_at(n, lo, delta) > 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _margin_at(n, mid, delta) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def mstar(n: int, delta: int, tol: float = 1e-10) -> int:
    """Index from which the analytic inequality certifies every sign."""
    r = rstar(n, delta, tol)
    return math.ceil(delta / 2 * saddle.stationary_lhs(n, r))


# ---------------------------------------------------------------------------
# the contour integral itself

def _log_q(n: int, r: float, theta, delta: int):
    return delta * saddle.log_borwein(n, r, theta)


def contour_coefficient(n: int, m: int, delta: int, r: float, num_points: int = 8192,
                        return_imag: bool = False):
    """Trapezoidal Cauchy integral for [q^m] P_n^delta on |q| = r.

    With more nodes than the degree the rule is exact up to rounding, so any
    radius r > 0 works; nodes that land on a zero of P_n contribute nothing.
    """
    if not r > 0:
        raise DomainError("need r > 0")
    deg = 3 * n * n * delta
    num_points = max(num_points, 1 << (deg + 1).bit_length())
    theta = -math.pi + 2 * math.pi * np.arange(num_points) / num_points
    with np.errstate(divide="ignore", invalid="ignore"):
        lq = _log_q(n, r, theta, delta) - 1j * m * theta
    live = np.isfinite(lq.real)
    shift = float(np.max(lq.real[live]))
    terms = np.where(live, np.exp(np.where(live, lq, 0) - shift), 0)
    total = np.sum(terms) / num_points
    val = total * math.exp(shift - m * math.log(r))
    return (float(val.real), float(val.imag)) if return_imag else float(val.real)


def _gauss_panels(a: float, b: float, panels: int, order: int = 24):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tail_pieces(theta0: float):
    c = 2 * math.pi / 3
    return [(-math.pi, -c - theta0), (-c + theta0, c - theta0), (c + theta0, math.pi)]


def contour_split(n: int, m: int, delta: int, r: float, panels: int = 256) -> dict:
    """Peak and tail parts of the Cauchy integral (Gauss-Legendre panels).

    Parts are scaled by r^-m / (2 pi) so that peak + tail = coefficient.
    """
    theta0 = saddle.cutoff_theta0(n, r)
    c = 2 * math.pi / 3
    ref = float(_log_q(n, r, np.array([c]), delta)[0].real)

    def part(pieces):
        acc = 0j
        for a, b in pieces:
            if b <= a:
                continue
            x, w = _gauss_panels(a, b, panels)
            acc += np.sum(w * np.exp(_log_q(n, r, x, delta) - 1j * m * x - ref))
        return acc * math.exp(ref - m * math.log(r)) / (2 * math.pi)

    peak = part([(c - theta0, c + theta0), (-c - theta0, -c + theta0)])
    tail = part(_tail_pieces(theta0))
    return {"peak": peak.real, "tail": tail.real, "whole": (peak + tail).real,
            "imag": (peak + tail).imag, "theta0": theta0}


@dataclass(frozen=True)
class MeasuredBudget:
    n: int
    m: int
    delta: int
    r: float
    lhs: float
    eps0: float
    eps1: float
    floor: float

    @property
    def verdict(self) -> bool:
        return self.eps0 + self.eps1 < self.floor


def measured_budget(n: int, m: int, delta: int, coefficient: int, panels: int = 512) -> MeasuredBudget:
    """eps0 and eps1 by direct quadrature of their defining integrals.

    ``lhs`` is the normalised distance between the coefficient and its
    two-peak prediction; it can never exceed eps0 + eps1.
    """
    r = saddle.solve_radius(n, m, delta)
    g = delta * 0.5 * saddle.U(2, n, r)
    theta0 = saddle.cutoff_theta0(n, r)
    c = 2 * math.pi / 3
    lq_peak = complex(_log_q(n, r, np.array([c]), delta)[0])
    norm = math.sqrt(g) / (math.sqrt(2 * math.pi) * math.erf(theta0 * math.sqrt(g / 2)))

    x, w = _gauss_panels(-theta0, theta0, panels)
    ratio = np.exp(_log_q(n, r, x + c, delta) - lq_peak - 1j * m * x)
    eps0 = 2 * norm * abs(np.sum(w * (ratio - np.exp(-g * x * x / 2))))

    eps1 = 0.0
    for a, b in _tail_pieces(theta0):
        xs, ws = _gauss_panels(a, b, panels)
        eps1 += np.sum(ws * np.exp((_log_q(n, r, xs, delta) - lq_peak).real))
    eps1 *= norm

    arg = lq_peak.imag
    log_scale = m * math.log(r) + math.log(math.sqrt(2 * math.pi * g)) \
        - math.log(math.erf(theta0 * math.sqrt(g / 2))) - lq_peak.real
    lhs = abs(float(coefficient) * math.exp(log_scale) - 2 * math.cos(arg - 2 * m * math.pi / 3))
    floor = abs(2 * math.cos(arg - 2 * m * math.pi / 3))
    return MeasuredBudget(n, m, delta, r, lhs, float(eps0), float(eps1), floor)
