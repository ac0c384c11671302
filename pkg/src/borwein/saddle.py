"""Log-derivative kernels, the power sums X_j, U_j, V_j and the radius solver.

The kernels are u_1(z) = z(1+2z)/(1+z+z^2), v_1(z) = z/(1+z+z^2) and their
images under repeated application of z d/dz.  Numerators are generated
exactly from the recurrence N_{j+1} = z (N_j' D - j N_j D') with
D = 1 + z + z^2, so u_j = N_j / D^j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

MAX_J = 8
C0 = 10.0 / 81.0
INFINITE = math.inf


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _next_numerator(num: list[int], j: int) -> list[int]:
    # z * (N' D - j N D'), lowest degree first
    deriv = [k * c for k, c in enumerate(num)][1:] or [0]
    left = _poly_mul(deriv, [1, 1, 1])
    right = _poly_mul(num, [-j, -2 * j])
    return [0] + _poly_add(left, right)


@lru_cache(maxsize=None)
def kernel_numerator(j: int, kind: str) -> tuple[int, ...]:
    """Integer numerator of u_j or v_j (lowest degree first); denominator (1+z+z^2)^j."""
    if not 1 <= j <= MAX_J:
        raise DomainError(f"kernel index {j} outside 1..{MAX_J}")
    if kind not in ("u", "v"):
        raise DomainError("kind must be 'u' or 'v'")
    num = [0, 1, 2] if kind == "u" else [0, 1]
    for i in range(1, j):
        num = _next_numerator(num, i)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def _kernel(j: int, kind: str, z):
    num = kernel_numerator(j, kind)
    z = np.asarray(z)
    den = (1.0 + z + z * z) ** j
    val = np.polynomial.polynomial.polyval(z, np.array(num, dtype=float))
    return val / den


def u(j: int, z):
    """u_j(z); accepts scalars or arrays, real or complex."""
    return _kernel(j, "u", z)


def v(j: int, z):
    return _kernel(j, "v", z)


def u1_real(x):
    """u_1 on [0, inf), stable for huge x (used when the radius exceeds 1)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        small = x * (1.0 + 2.0 * x) / (1.0 + x + x * x)
        y = 1.0 / x
        large = (y + 2.0) / (y * y + y + 1.0)
    return np.where(x <= 1.0, small, large)


# --------------------------------------------------------------------------
# X_j

def _ks(n: int) -> np.ndarray:
    k = np.arange(1, 3 * n + 1)
    return k[k % 3 != 0].astype(float)


@lru_cache(maxsize=None)
def _eulerian(j: int) -> tuple[int, ...]:
    """Coefficients of A_j with sum_{k>=1} k^j x^k = x A_j(x) / (1-x)^{j+1}."""
    row = [1]
    for m in range(1, j + 1):
        new = [0] * m
        for k in range(m):
            a = row[k] if k < len(row) else 0
            b = row[k - 1] if 0 <= k - 1 < len(row) else 0
            new[k] = (k + 1) * a + (m - k) * b
        row = new
    return tuple(row)


def _polylog_neg(i: int, x: float) -> float:
    """Li_{-i}(x) = sum_{k>=1} k^i x^k for 0 <= x < 1."""
    coeffs = _eulerian(i)
    return x * float(np.polynomial.polynomial.polyval(x, coeffs)) / (1.0 - x) ** (i + 1)


def _partial_power_sum(j: int, N: int, x: float) -> float:
    # sum_{k=1}^{N} k^j x^k = Li_{-j}(x) - x^N sum_i C(j,i) N^{j-i} Li_{-i}(x)
    tail = sum(math.comb(j, i) * float(N) ** (j - i) * _polylog_neg(i, x) for i in range(j + 1))
    return _polylog_neg(j, x) - x ** N * tail


def X_direct(j: int, n: int, r: float) -> float:
    k = _ks(n)
    return float(np.sum(k ** j * r ** k))


def X(j: int, n, r: float) -> float:
    """sum_{k <= 3n, 3 does not divide k} k^j r^k (n may be INFINITE)."""
    if not 0 <= j <= MAX_J:
        raise DomainError("j must lie in 0..8")
    if not 0.0 < r <= 1.0:
        raise DomainError("need 0 < r <= 1")
    if n == INFINITE:
        if r >= 1.0:
            return math.inf
        return _polylog_neg(j, r) - 3.0 ** j * _polylog_neg(j, r ** 3)
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return 0.0
    if 1.0 - r ** 3 < 1e-4:
        return X_direct(j, n, r)
    val = _partial_power_sum(j, 3 * n, r) - 3.0 ** j * _partial_power_sum(j, n, r ** 3)
    # heavy cancellation between the two tails: fall back to the plain sum
    if val <= 0 or _polylog_neg(j, r) > 64.0 * val:
        return X_direct(j, n, r)
    return val


# --------------------------------------------------------------------------
# U_j, V_j

def _power_terms(n: int, z):
    k = np.arange(1, n + 1)
    a = 3 * k - 2
    b = 3 * k - 1
    z = complex(z)
    if z == 0:
        za = np.zeros(n, dtype=complex)
        zb = np.zeros(n, dtype=complex)
    else:
        lz = np.log(z)
        za = np.exp(a * lz)
        zb = np.exp(b * lz)
    return a.astype(float), b.astype(float), za, zb


def U(j: int, n: int, z) -> complex | float:
    """sum_k (3k-2)^j u_j(z^{3k-2}) + (3k-1)^j u_j(z^{3k-1})."""
    a, b, za, zb = _power_terms(n, z)
    val = np.sum(a ** j * u(j, za) + b ** j * u(j, zb))
    return float(val.real) if np.isrealobj(z) or complex(z).imag == 0 else complex(val)


def V(j: int, n: int, z) -> complex | float:
    """sum_k (3k-2)^j v_j(z^{3k-2}) - (3k-1)^j v_j(z^{3k-1})."""
    a, b, za, zb = _power_terms(n, z)
    val = np.sum(a ** j * v(j, za) - b ** j * v(j, zb))
    return float(val.real) if np.isrealobj(z) or complex(z).imag == 0 else complex(val)


def log_derivative(j: int, n: int, r: float, theta: float, delta: int = 1) -> complex:
    """j-th theta-derivative of delta*log P_n(r e^{i theta}) via U_j and V_j."""
    z = r * np.exp(1j * (theta - 2 * math.pi / 3))
    a, b, za, zb = _power_terms(n, z)
    Uj = np.sum(a ** j * u(j, za) + b ** j * u(j, zb))
    Vj = np.sum(a ** j * v(j, za) - b ** j * v(j, zb))
    return delta * (0.5 * 1j ** j * Uj + (math.sqrt(3) / 2) * 1j ** (j - 1) * Vj)


def log_borwein(n: int, r: float, theta, delta: int = 1):
    """delta * log P_n(r e^{i theta}) as a sum of principal logarithms."""
    k = _ks(n)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    w = (r ** k)[None, :] * np.exp(1j * np.outer(th, k))
    out = delta * np.sum(np.log1p(-w), axis=1)
    return out if np.ndim(theta) else complex(out[0])


# --------------------------------------------------------------------------
# radius, cutoffs

def stationary_lhs(n: int, r: float) -> float:
    """sum_{3 does not divide k} k u_1(r^k); equals U_1(n, r)."""
    k = _ks(n)
    with np.errstate(over="ignore"):
        return float(np.sum(k * u1_real(r ** k)))


def solve_radius(n: int, m: float, delta: int = 1, max_iter: int = 200) -> float:
    """Radius r with U_1(n, r) = 2m/delta (frozen-argument saddle equation)."""
    deg = 3 * n * n
    if not 0 < m < delta * deg:
        raise DomainError(f"m={m} outside (0, {delta * deg})")
    target = 2.0 * m / delta
    if target == deg:
        return 1.0
    # stricter than needed; bisection stops anyway once the bracket collapses
    tol = 1e-14 * target
    if target < deg:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = 1.0, 2.0
        while stationary_lhs(n, hi) < target:
            lo, hi = hi, 2.0 * hi
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        val = stationary_lhs(n, mid)
        if abs(val - target) <= tol:
            break
        if val < target:
            lo = mid
        else:
            hi = mid
    return mid


def _ratio(a: float, b: float, r: float) -> float:
    """(1 - r^a) / (1 - r^b), with the limit a/b at r = 1."""
    if r == 1.0:
        return a / b
    lr = math.log(r)
    return math.expm1(a * lr) / math.expm1(b * lr)


def cutoff_theta0(n: int, r: float) -> float:
    """Half-width C_0 (1-r^3)/(1-r^{3n}) of the peak arc."""
    if not 0.0 < r <= 1.0:
        raise DomainError("need 0 < r <= 1")
    return C0 * _ratio(3, 3 * n, r)


def r_floor(n: int, delta: int = 1) -> float:
    """exp(-sqrt(4 delta / (27 n))), the smallest radius for m >= 3n."""
    return math.exp(-math.sqrt(4.0 * delta / (27.0 * n)))


@dataclass(frozen=True)
class SaddleContext:
    n: int
    m: float
    delta: int
    r: float
    r0: float
    theta0: float
    g: float
    X: tuple[float, ...]

    def as_dict(self) -> dict:
        out = {"n": self.n, "m": self.m, "delta": self.delta, "r": self.r,
               "r0": self.r0, "theta0": self.theta0, "g": self.g}
        out.update({f"X{j}": x for j, x in enumerate(self.X)})
        return out


def saddle_context(n: int, m: float, delta: int = 1, r: float | None = None) -> SaddleContext:
    if r is None:
        r = solve_radius(n, m, delta)
    rr = min(r, 1.0)
    g = 0.5 * delta * U(2, n, r)
    xs = tuple(X(j, n, rr) for j in range(5))
    return SaddleContext(n, m, delta, r, r_floor(n, delta), cutoff_theta0(n, rr), g, xs)
