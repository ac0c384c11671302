"""Shared oracles: naive list arithmetic, independent of the packed engine."""
import pytest


def naive_mul(a, b, trunc=None):
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc + 1)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += x * y
    return out


def naive_product(exponents, trunc=None):
    """prod (1 - q^e) for e in exponents, by repeated convolution."""
    out = [1]
    for e in exponents:
        f = [0] * (e + 1)
        f[0], f[e] = 1, -1
        out = naive_mul(out, f, trunc)
    return out


def naive_inverse(exponent, trunc):
    """1 / (1 - q^e) up to q^trunc."""
    return [1 if m % exponent == 0 else 0 for m in range(trunc + 1)]


def naive_borwein(n, delta=1):
    exps = [k for k in range(1, 3 * n + 1) if k % 3] * delta
    return naive_product(exps)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
