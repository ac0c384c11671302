"""Heuristic sign-pattern predictor for products over a general modulus K.

The coefficient of q^m is modelled by a sum over the dominant peaks of the
integrand (near K-th roots of unity) of 2 cos(arg - m theta), where the
argument of each pair of factors is approximated as a function of
s = r^{K n}.  Scanning s over [0, 1] predicts where signs flip; the saddle
equation in its continuum limit turns a root s0 into a fraction m / deg.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, InvalidSpecError, SingularityError
from .qseries import INFINITE, ProductSpec, modk_spec

DOMINANCE_RATE = 0.01   # peaks within exp(-0.01 n) of the largest are co-dominant
SCAN_POINTS = 1024
ROOT_TOL = 1e-8
ZERO_EPS = 1e-12        # targets this small are treated as exact zeros
SAMPLE_S = 0.5          # r^{Kn} at which peak magnitudes are compared


@dataclass(frozen=True)
class Peak:
    index: int
    theta: float
    log_magnitude: float
    dominant: bool


@dataclass(frozen=True)
class PeakSet:
    """Candidates at theta = 2 pi l / K for 1 <= l <= K/2; each stands for +-theta."""

    modulus: int
    peaks: tuple[Peak, ...]

    @property
    def dominant(self) -> tuple[Peak, ...]:
        return tuple(p for p in self.peaks if p.dominant)

    def as_dict(self) -> dict:
        return {"modulus": self.modulus,
                "peaks": [{"l": p.index, "theta": p.theta, "log_magnitude": p.log_magnitude,
                           "dominant": p.dominant} for p in self.peaks],
                "dominant": [p.index for p in self.dominant]}


class AmbiguousRoots(tuple):
    """Several sign changes on (0, 1); returned instead of a single root."""

    ambiguous = True


def spec_length(spec: ProductSpec) -> int:
    """Common factor length n of a finite spec (the largest one if they differ)."""
    lengths = [f.length for f in spec.factors]
    if not lengths or any(L == INFINITE for L in lengths):
        raise InvalidSpecError("predictor needs a finite product")
    return int(max(lengths))


def _log_abs_product(spec: ProductSpec, r: float, theta: float) -> float:
    exps = spec.exponents(None)
    e = np.array([x for x, _ in exps], dtype=float)
    mult = np.array([k for _, k in exps], dtype=float)
    w = np.exp(e * math.log(r) + 1j * e * theta)
    return float(np.sum(mult * np.log(np.abs(1 - w))))


def dominant_peaks(spec: ProductSpec, n: int, r: float, rate: float = DOMINANCE_RATE) -> PeakSet:
    """Rank every candidate root-of-unity direction by log|Q(r e^{i theta})|."""
    if not 0 < r < 1:
        raise DomainError("need 0 < r < 1")
    K = spec.modulus
    cands = []
    for l in range(1, K // 2 + 1):
        theta = 2 * math.pi * l / K
        cands.append((l, theta, _log_abs_product(spec, r, theta)))
    top = max(c[2] for c in cands)
    tol = rate * n
    return PeakSet(K, tuple(Peak(l, th, lm, lm >= top - tol) for l, th, lm in cands))


def default_peaks(spec: ProductSpec) -> PeakSet:
    n = spec_length(spec)
    r = SAMPLE_S ** (1.0 / (spec.modulus * n))
    return dominant_peaks(spec, n, r)


def peak_argument_contribution(alpha: float, K: int, theta: float, s: float) -> float:
    """Argument contributed by (q^a;q^K)_n (q^{K-a};q^K)_n at r e^{i theta}, s = r^{Kn}.

    The O(s/n) correction is not included.
    """
    if not 0 <= s <= 1:
        raise DomainError("s must lie in [0, 1]")
    half = alpha * theta / 2
    sin = math.sin(half)
    if abs(sin) < 1e-12:
        raise SingularityError(f"cot pole at alpha*theta/2 = {half}")
    return -(K - 2 * alpha) / K * math.atan((1 - s) / (1 + s) * math.cos(half) / sin)


def pair_weights(spec: ProductSpec) -> dict[int, float]:
    """Offsets folded to alpha = min(a, K - a); a single factor counts as half a pair."""
    K = spec.modulus
    out: dict[int, float] = {}
    for f in spec.factors:
        a = int(f.offset)
        if a == K:
            continue  # 1 - r^{Ki} is real and positive at every peak
        alpha = min(a, K - a)
        if 2 * alpha == K:
            continue  # zero weight in the argument formula
        out[alpha] = out.get(alpha, 0.0) + f.multiplicity / 2
    return out


def peak_argument(spec: ProductSpec, theta: float, s: float) -> float:
    K = spec.modulus
    return sum(w * peak_argument_contribution(a, K, theta, s)
               for a, w in sorted(pair_weights(spec).items()))


def general_target(spec: ProductSpec, residue: int, s: float, peaks: PeakSet | None = None) -> float:
    """Sum over dominant peak pairs of 2 cos(arg - m theta) for m = residue mod K."""
    if peaks is None:
        peaks = default_peaks(spec)
    total = 0.0
    for p in peaks.dominant:
        total += 2 * math.cos(peak_argument(spec, p.theta, s) - residue * p.theta)
    return total


def _signs(vals, eps: float = ZERO_EPS) -> list[int]:
    return [0 if abs(v) <= eps else (1 if v > 0 else -1) for v in vals]


def _bisect(fn, a: float, b: float, tol: float) -> float:
    return optimize.brentq(fn, a, b, xtol=tol)


def sign_change_root(spec: ProductSpec, residue: int, peaks: PeakSet | None = None,
                     points: int = SCAN_POINTS, tol: float = ROOT_TOL):
    """Zero of general_target in s on (0, 1).

    Returns None, one float, or AmbiguousRoots when the scan sees several.
    """
    if peaks is None:
        peaks = default_peaks(spec)

    def fn(s):
        return general_target(spec, residue, s, peaks)

    grid = np.linspace(0.0, 1.0, points)
    signs = _signs([fn(x) for x in grid])
    roots = []
    last = None  # index of the previous grid point with a nonzero value
    for i, sg in enumerate(signs):
        if sg == 0:
            continue
        if last is not None and signs[last] != sg:
            roots.append(_bisect(fn, grid[last], grid[i], tol))
        last = i
    if not roots:
        return None
    if len(roots) == 1:
        return roots[0]
    return AmbiguousRoots(roots)


# ---------------------------------------------------------------------------
# root -> m / deg

def _re_geometric(x: float, c: complex) -> float:
    """Re[x c / (1 - x c)] for |c| = 1, c != 1."""
    w = x * c
    return (w / (1 - w)).real


def fraction_at_root(spec: ProductSpec, s0: float, peaks: PeakSet | None = None) -> float:
    """Continuum limit of m / deg at r^{Kn} = s0 from the frozen saddle equation.

    m is the mean over dominant peaks of Re z d/dz log Q(z); with
    k = K n u the sum over each factor's exponents becomes an integral in u.
    """
    if not 0 < s0 <= 1:
        raise DomainError("s0 must lie in (0, 1]")
    if peaks is None:
        peaks = default_peaks(spec)
    K = spec.modulus
    n = spec_length(spec)
    dom = peaks.dominant
    if not dom:
        raise InvalidSpecError("no dominant peaks")
    log_s = math.log(s0)
    m_lead = 0.0
    deg_lead = 0.0
    for f in spec.factors:
        L = int(f.length)
        if L == 0:
            continue
        a = int(f.offset)
        cs = [np.exp(1j * a * p.theta) for p in dom]
        scale = L / n
        real_c = [c for c in cs if abs(c - 1) < 1e-12]
        other = [c for c in cs if abs(c - 1) >= 1e-12]

        def integrand(u, other=other, nreal=len(real_c), scale=scale):
            t = u * scale * log_s
            x = math.exp(t)
            acc = u * sum(_re_geometric(x, c) for c in other)
            if nreal:
                # u x / (1 - x) tends to -1 / (scale log s) as u -> 0
                acc += nreal * (u * x / -math.expm1(t) if t else -1.0 / (scale * log_s))
            return -acc / len(cs)

        if log_s == 0.0:
            # s0 = 1: x = 1 throughout and Re[c/(1-c)] = -1/2
            if real_c:
                raise SingularityError("factor vanishes at a dominant peak")
            integral = 0.25
        else:
            integral = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
        m_lead += f.multiplicity * K * L * L * integral
        deg_lead += f.multiplicity * K * L * L / 2
    return m_lead / deg_lead


def _mod7_kernel(t: float) -> float:
    # (x - 7x^7 + 6x^8) / ((1-x)(1-x^7)) with x = e^t; 0/0 at t = 0
    if abs(t) < 1e-3:
        return 3 + 4 * t - 10 * t ** 3 / 3
    num = math.exp(t) * (6 * math.expm1(7 * t) - 7 * math.expm1(6 * t))
    return num / (math.expm1(t) * math.expm1(7 * t))


def mod7_fraction(s0: float) -> float:
    """The K = 7 limit written out explicitly; kept as a regression anchor."""
    if not 0 < s0 < 1:
        raise DomainError("s0 must lie in (0, 1)")
    ls = math.log(s0)
    val = integrate.quad(lambda u: u * _mod7_kernel(u * ls), 0.0, 1.0, epsabs=1e-12, epsrel=1e-11)[0]
    return 7 / 18 * 6 / 7 * val


# ---------------------------------------------------------------------------
# tabulation

@dataclass(frozen=True)
class ScanEntry:
    residue: int
    at_zero: float
    at_one: float
    roots: tuple[float, ...]
    fractions: tuple[float, ...]
    ambiguous: bool = False
    pattern: str = field(default="")

    def as_dict(self) -> dict:
        return {"residue": self.residue, "target_s0": self.at_zero, "target_s1": self.at_one,
                "roots": list(self.roots), "fractions": list(self.fractions),
                "ambiguous": self.ambiguous, "pattern": self.pattern}


def _pattern(vals) -> str:
    out = []
    for sg in _signs(vals):
        ch = "+-0"[{1: 0, -1: 1, 0: 2}[sg]]
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


def scan_residues(spec: ProductSpec, peaks: PeakSet | None = None) -> list[ScanEntry]:
    """Predicted behaviour of every residue class m mod K."""
    if peaks is None:
        peaks = default_peaks(spec)
    rows = []
    grid = np.linspace(0.0, 1.0, SCAN_POINTS)
    for res in range(spec.modulus):
        root = sign_change_root(spec, res, peaks)
        roots = () if root is None else tuple(root) if isinstance(root, AmbiguousRoots) else (root,)
        fracs = tuple(fraction_at_root(spec, s, peaks) for s in roots if s > 0)
        vals = [general_target(spec, res, s, peaks) for s in grid]
        # several roots, or a target that touches zero, make the call unreliable
        ambiguous = isinstance(root, AmbiguousRoots) or 0 in _signs(vals)
        rows.append(ScanEntry(res, vals[0], vals[-1], roots, fracs, ambiguous, _pattern(vals)))
    return rows


def scan_modulus(K: int, n: int = 50, delta: int = 1) -> list[ScanEntry]:
    return scan_residues(modk_spec(K, n, delta))
