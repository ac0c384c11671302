"""Offset Maclaurin bound for sums of f(3k-2) - f(3k-1)."""
from __future__ import annotations

from ..errors import ContractError


def maclaurin_alt_bound(f0: float, f3n: float, d2_0: float, d2_3n: float,
                        d4_sup: float, n: int) -> float:
    """Bound for |sum_{k=1}^n (f(3k-2) - f(3k-1))|.

    Inputs are f(0), f(3n), f''(0), f''(3n) and a bound for |f''''| on
    [0, 3n].  The remainder carries the factor n of the summation length.
    """
    if d4_sup < 0:
        raise ContractError("fourth-derivative bound must be >= 0")
    if n < 1:
        raise ContractError("n must be >= 1")
    return abs(f3n - f0) / 3.0 + 2.0 * abs(d2_3n - d2_0) / 3.0 + 11.0 * n / 96.0 * d4_sup
