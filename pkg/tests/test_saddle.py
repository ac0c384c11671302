import math

import mpmath
import numpy as np
import pytest
import sympy as sp

from borwein import saddle
from borwein.errors import DomainError
from borwein.saddle import (INFINITE, U, V, X, X_direct, cutoff_theta0, kernel_numerator,
                            log_borwein, log_derivative, r_floor, saddle_context, solve_radius,
                            stationary_lhs, u, v)


def _rand_disk(rng, k):
    rad = np.sqrt(rng.uniform(0, 1, k))
    return rad * np.exp(1j * rng.uniform(-np.pi, np.pi, k))


# printed closed forms, D = 1 + z + z^2
PRINTED = {
    ("u", 2): lambda z: z * (1 + 4 * z + z ** 2),
    ("v", 2): lambda z: z * (1 - z ** 2),
    ("u", 3): lambda z: z * (1 - z ** 2) * (1 + 7 * z + z ** 2),
    ("v", 3): lambda z: z * (1 - z - 6 * z ** 2 - z ** 3 + z ** 4),
    ("u", 4): lambda z: z * (1 + 12 * z - 12 * z ** 2 - 56 * z ** 3 - 12 * z ** 4 + 12 * z ** 5 + z ** 6),
    ("v", 4): lambda z: z * (1 - z ** 2) * (1 - 4 * z - 21 * z ** 2 - 4 * z ** 3 + z ** 4),
}


@pytest.mark.parametrize("kind,j", list(PRINTED))
def test_kernels_match_printed_list(kind, j, rng):
    zs = _rand_disk(rng, 100)
    fn = u if kind == "u" else v
    ref = PRINTED[(kind, j)](zs) / (1 + zs + zs ** 2) ** j
    assert np.max(np.abs(fn(j, zs) - ref)) < 1e-12


def test_kernels_are_iterated_euler_derivatives():
    z = sp.symbols("z")
    D = 1 + z + z ** 2
    cur = {"u": z * (1 + 2 * z) / D, "v": z / D}
    for j in range(1, 9):
        for kind in ("u", "v"):
            num = sp.Poly(sp.cancel(cur[kind] * D ** j), z)
            assert tuple(int(c) for c in reversed(num.all_coeffs())) == kernel_numerator(j, kind)
        cur = {k: sp.simplify(z * sp.diff(e, z)) for k, e in cur.items()}


def test_kernel_domain():
    with pytest.raises(DomainError):
        kernel_numerator(9, "u")
    with pytest.raises(DomainError):
        kernel_numerator(1, "w")


def test_u1_special_values():
    assert u(1, 1.0) == pytest.approx(1.0)
    assert saddle.u1_real(1e300) == pytest.approx(2.0)


# --- X_j -------------------------------------------------------------------

def test_X_at_one():
    for n in (1, 7, 100):
        assert X(0, n, 1.0) == 2 * n
        assert X(1, n, 1.0) == 3 * n * n


def test_X0_floor_example():
    assert X(0, 400, r_floor(400, 3)) > 19


def test_X_closed_form_matches_direct(rng):
    for _ in range(60):
        n = int(rng.integers(1, 201))
        r = float(rng.uniform(0.3, 1.0))
        for j in range(9):
            a, b = X(j, n, r), X_direct(j, n, r)
            assert abs(a - b) <= 1e-12 * abs(b)


def test_X_monotone_in_n_and_r():
    rs = np.linspace(0.5, 1.0, 30)
    for j in range(5):
        for n in (5, 50, 400):
            vals = [X(j, n, r) for r in rs]
            assert all(b > a for a, b in zip(vals, vals[1:]))
        assert X(j, 41, 0.97) > X(j, 40, 0.97)


def test_X_infinite_and_domain():
    assert X(2, INFINITE, 0.9) == pytest.approx(X_direct(2, 2000, 0.9), rel=1e-12)
    assert X(0, INFINITE, 1.0) == math.inf
    for bad in (0.0, -0.5, 1.01):
        with pytest.raises(DomainError):
            X(1, 10, bad)
    with pytest.raises(DomainError):
        X(9, 10, 0.5)


@pytest.mark.parametrize("delta", [1, 2, 3])
def test_X_floors(delta):
    for n in (400, 547, 1000, 2500, 5000):
        r0 = r_floor(n, delta)
        for r in np.linspace(r0, 1.0, 8)[1:]:
            assert X(0, n, r) > 0.95 * math.sqrt(n)
            assert X(1, n, r) > 1.35 * n
            assert X(3, n, r) > 16 * n ** 2
            assert X(4, n, r) > 94 * n ** 2.5


# --- U_j, V_j ----------------------------------------------------------------

def test_V_at_zero():
    for j in range(1, 9):
        assert V(j, 30, 0.0) == 0


def test_U_real_for_real_argument():
    assert isinstance(U(2, 10, 0.8), float)
    assert isinstance(U(2, 10, 0.8j), complex)


def test_U1_equals_stationary_sum():
    for r in (0.3, 0.9, 0.999):
        assert U(1, 40, r) == pytest.approx(stationary_lhs(40, r), rel=1e-13)


def _mp_log_product(n, r, theta):
    z = mpmath.mpf(r) * mpmath.expjpi(2 * mpmath.mpf(theta) / (2 * mpmath.pi))
    return mpmath.fsum(mpmath.log(1 - z ** k) for k in range(1, 3 * n + 1) if k % 3)


def _mp_theta_derivative(n, r, theta, order):
    with mpmath.workdps(40):
        f = lambda t: _mp_log_product(n, r, t)
        return complex(mpmath.diff(f, mpmath.mpf(theta), order))


def test_g_matches_finite_differences(rng):
    for _ in range(10):
        n = int(rng.integers(2, 51))
        r = float(rng.uniform(0.8, 0.999))
        ref = -_mp_theta_derivative(n, r, 2 * math.pi / 3, 2).real
        assert 0.5 * U(2, n, r) == pytest.approx(ref, rel=1e-6, abs=1e-6)


def test_derivative_identity(rng):
    for _ in range(12):
        n = int(rng.integers(2, 41))
        r = float(rng.uniform(0.7, 0.99))
        th = float(rng.uniform(0, 2 * math.pi))
        for j in (1, 2):
            ref = _mp_theta_derivative(n, r, th, j)
            an = log_derivative(j, n, r, th)
            assert abs(ref - an) <= 1e-5 * max(1.0, abs(an))


def test_log_borwein_matches_product():
    th = np.array([0.1, 2.0, 2 * math.pi / 3])
    direct = [complex(_mp_log_product(12, 0.9, t)) for t in th]
    assert np.allclose(np.exp(log_borwein(12, 0.9, th)), np.exp(direct), rtol=1e-12)


# --- radius ------------------------------------------------------------------

def test_radius_centre():
    for delta in (1, 2, 3):
        assert solve_radius(30, delta * 3 * 30 * 30 / 2, delta) == 1.0


def test_radius_residual():
    for n, m, delta in [(400, 1200, 1), (100, 5000, 2), (50, 111, 3), (20, 1000, 1)]:
        r = solve_radius(n, m, delta)
        target = 2 * m / delta
        assert abs(U(1, n, r) - target) < 1e-12 * target


def test_radius_bound_n400():
    r = solve_radius(400, 1200, 1)
    assert r_floor(400, 1) < r < 1


def test_radius_monotone():
    n = 100
    rs = [solve_radius(n, m) for m in (3 * n, 6 * n, 3 * n * n / 2)]
    assert rs[0] < rs[1] < rs[2]


def test_radius_above_floor_whole_range():
    for delta in (1, 2, 3):
        for n in (20, 100):
            for m in np.linspace(3 * n, delta * 3 * n * n / 2, 12):
                assert r_floor(n, delta) < solve_radius(n, float(m), delta) <= 1


def test_radius_past_centre():
    r = solve_radius(20, 1000, 1)
    assert r > 1 and stationary_lhs(20, r) == pytest.approx(2000, rel=1e-12)


def test_radius_domain():
    for m in (0, -1, 3 * 10 * 10):
        with pytest.raises(DomainError):
            solve_radius(10, m, 1)


# --- cutoffs -----------------------------------------------------------------

def test_theta0_limit():
    for n in (4, 100, 999):
        assert cutoff_theta0(n, 1.0) == pytest.approx(10 / (81 * n))
        assert cutoff_theta0(n, 1 - 1e-12) == pytest.approx(10 / (81 * n), rel=1e-8)


def test_r_floor_example():
    assert r_floor(400, 3) == math.exp(-math.sqrt(12 / 10800))


@pytest.mark.parametrize("delta", [1, 2, 3])
def test_theta0_ratio_bound(delta):
    for n in range(4, 1001):
        r0 = r_floor(n, delta)
        ratio = (1 - r0 ** 3) / (1 - r0 ** (3 * n))
        assert ratio <= -3 * math.log(r0)


def test_context():
    ctx = saddle_context(400, 1200, 1)
    assert ctx.r0 < ctx.r <= 1 and ctx.g > 0
    assert ctx.g == pytest.approx(0.5 * U(2, 400, ctx.r))
    d = ctx.as_dict()
    assert set(d) >= {"r", "r0", "theta0", "g", "X0", "X4"}
