"""Residue-class sign rules and violation scans over polynomial families."""
from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ._packed import PackedPoly, log2_coeff_bound, width_for_bits
from .errors import ContractError, UnsupportedCaseError
from .qseries import Factor, ProductSpec, TruncatedSeries


class Sign(enum.Enum):
    NONNEG = "+"
    NONPOS = "-"
    ZERO = "0"
    FREE = "*"

    def violated_by(self, s: int) -> bool:
        """True when a coefficient of sign s (-1, 0, 1) contradicts this."""
        if self is Sign.NONNEG:
            return s < 0
        if self is Sign.NONPOS:
            return s > 0
        if self is Sign.ZERO:
            return s != 0
        return False


@dataclass(frozen=True)
class SignRule:
    """Expected sign per residue class mod K on an index range.

    ``switch`` optionally flips a residue class: ``{r: (last, sign)}`` means
    the ``expected`` sign holds for exponents up to ``last`` and ``sign``
    beyond it.  ``m_range=None`` means the whole available range.
    """

    modulus: int
    expected: Mapping[int, Sign]
    m_range: tuple[int, int] | None = None
    switch: Mapping[int, tuple[int, Sign]] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(range(self.modulus)) - set(self.expected)
        if missing:
            raise ContractError(f"no expectation for residues {sorted(missing)}")
        if self.m_range is not None and self.m_range[0] > self.m_range[1]:
            raise ContractError("empty m_range")

    def sign_at(self, m: int) -> Sign:
        r = m % self.modulus
        if r in self.switch and m > self.switch[r][0]:
            return self.switch[r][1]
        return self.expected[r]

    def restricted(self, lo: int, hi: int) -> "SignRule":
        return SignRule(self.modulus, self.expected, (lo, hi), self.switch)


@dataclass(frozen=True)
class Violation:
    m: int
    residue: int
    coefficient: int
    expected: Sign

    def as_dict(self) -> dict:
        return {"m": self.m, "coeff": str(self.coefficient)}


def _bad_indices(signs: np.ndarray, rule: SignRule, lo: int, hi: int) -> list[tuple[int, Sign]]:
    """Indices in [lo, hi] whose sign contradicts the rule, ascending."""
    K = rule.modulus
    hi = min(hi, len(signs) - 1)
    found: list[tuple[int, Sign]] = []
    if hi < lo:
        return found
    for r in range(K):
        first = lo + ((r - lo) % K)
        if first > hi:
            continue
        pieces = [(first, hi, rule.expected[r])]
        if r in rule.switch:
            last, after = rule.switch[r]
            pieces = [(first, min(hi, last), rule.expected[r]),
                      (max(first, first + K * math.ceil((last + 1 - first) / K)), hi, after)]
        for a, b, sign in pieces:
            if a > b or sign is Sign.FREE:
                continue
            block = signs[a:b + 1:K]
            if sign is Sign.NONNEG:
                bad = np.nonzero(block < 0)[0]
            elif sign is Sign.NONPOS:
                bad = np.nonzero(block > 0)[0]
            else:
                bad = np.nonzero(block != 0)[0]
            found.extend((a + K * int(i), sign) for i in bad)
    found.sort(key=lambda t: t[0])
    return found


def series_signs(s: TruncatedSeries) -> np.ndarray:
    return np.fromiter(((c > 0) - (c < 0) for c in s.coeffs), dtype=np.int8, count=len(s.coeffs))


def verify_pattern(s: TruncatedSeries, rule: SignRule) -> list[Violation]:
    """All coefficients of s inside rule.m_range that contradict the rule."""
    lo, hi = rule.m_range if rule.m_range is not None else (0, s.trunc)
    if lo < 0:
        raise ContractError("m_range must start at >= 0")
    if hi > s.trunc and not s.is_exact:
        raise ContractError(f"m_range up to {hi} exceeds truncation order {s.trunc}")
    bad = _bad_indices(series_signs(s), rule, lo, min(hi, s.trunc))
    K = rule.modulus
    return [Violation(m, m % K, s.coeffs[m], sign) for m, sign in bad]


# --------------------------------------------------------------------------
# rule builders

_PM = {"+": Sign.NONNEG, "-": Sign.NONPOS, "0": Sign.ZERO, "*": Sign.FREE}


def rule_from_pattern(pattern: str, m_range=None) -> SignRule:
    """SignRule from a string like '+--' (one character per residue)."""
    return SignRule(len(pattern), {r: _PM[c] for r, c in enumerate(pattern)}, m_range)


def borwein_rule(K: int) -> SignRule:
    if K == 3:
        return rule_from_pattern("+--")
    if K == 5:
        return rule_from_pattern("+----")
    raise UnsupportedCaseError(f"no Borwein-type rule for K={K}")


def cubic_rule(n: int) -> SignRule:
    """Cube of P_n: residue 0 nonnegative, residue 1 nonpositive on the first half."""
    half = (9 * n * n) // 2
    return SignRule(3, {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.FREE}, (0, half))


def power_rule(n: int, delta: int) -> SignRule:
    """The sign rule proved for P_n^delta."""
    if delta in (1, 2):
        return borwein_rule(3)
    if delta == 3:
        return cubic_rule(n)
    raise UnsupportedCaseError(f"no rule for delta={delta}")


def mod4_limits(n: int, delta: int) -> tuple[int, int]:
    """Largest m with the half-range statements for 4m+1 and 4m+3."""
    base = 6 * delta * n * n
    if n % 2 == 0:
        one = three = (base - 8) // 8
    else:
        one = (base - 8 + 2 * delta) // 8
        three = (base - 6 * delta + 8 * (delta == 3)) // 8
    return one, three


def mod4_rule(n: int, delta: int) -> SignRule:
    """Modulus-4 rule, including the mirrored signs beyond the half range."""
    if delta not in (1, 2, 3):
        raise UnsupportedCaseError("delta must be 1, 2 or 3")
    one, three = mod4_limits(n, delta)
    return SignRule(
        4,
        {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.NONPOS, 3: Sign.NONNEG},
        None,
        {1: (4 * one + 1, Sign.NONNEG), 3: (4 * three + 3, Sign.NONPOS)},
    )


def mod4_half_rule(n: int, delta: int) -> SignRule:
    """Only the half-range statements for residues 1 and 3."""
    one, three = mod4_limits(n, delta)
    return SignRule(
        4,
        {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.NONPOS, 3: Sign.NONNEG},
        None,
        {1: (4 * one + 1, Sign.FREE), 3: (4 * three + 3, Sign.FREE)},
    )


def mod7_rule(n: int, alpha: float | None = None) -> SignRule:
    """Modulus-7 rule; residue 5 switches at 3*alpha*n^2 when alpha is given."""
    expected = {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.FREE, 3: Sign.NONPOS,
                4: Sign.NONPOS, 5: Sign.FREE, 6: Sign.NONPOS}
    switch = {}
    if alpha is not None:
        expected[5] = Sign.NONNEG
        switch[5] = (7 * math.floor(3 * alpha * n * n) + 5, Sign.NONPOS)
    return SignRule(7, expected, None, switch)


def iks_rule(K: int, a: int) -> SignRule:
    """Sign rule for prod (1-q^{a+iK})(1-q^{K-a+iK}), K odd, gcd(a,K)=1.

    Residues +-(2l+1)a with 2(2l+1) < K are nonpositive, the rest nonnegative.
    """
    if K % 2 == 0 or math.gcd(a, K) != 1 or not 1 <= a <= K // 2:
        raise UnsupportedCaseError("need K odd, gcd(a,K)=1, 1 <= a <= K/2")
    neg = set()
    for l in range(K):
        if 2 * (2 * l + 1) >= K:
            break
        neg.add(((2 * l + 1) * a) % K)
        neg.add((-(2 * l + 1) * a) % K)
    return SignRule(K, {r: (Sign.NONPOS if r in neg else Sign.NONNEG) for r in range(K)})


def first_sign_change(s: TruncatedSeries, K: int, residue: int, start: int = 0) -> int | None:
    """First exponent m = residue mod K (m >= start) with a negative coefficient."""
    for m in range(start + ((residue - start) % K), s.trunc + 1, K):
        if s.coeffs[m] < 0:
            return m
    return None


# --------------------------------------------------------------------------
# families and scans

@dataclass(frozen=True)
class Family:
    """prod_a (q^a; q^K)_n^delta over a fixed offset set, indexed by n."""

    name: str
    modulus: int
    offsets: tuple[int, ...]
    delta: int = 1

    def spec(self, n: int) -> ProductSpec:
        return ProductSpec(self.modulus, tuple(Factor(a, self.delta, n) for a in self.offsets),
                           f"{self.name} n={n}")

    def degree(self, n: int) -> int:
        K = self.modulus
        return self.delta * sum(a * n + K * n * (n - 1) // 2 for a in self.offsets)

    def exponents_at(self, n: int) -> list[int]:
        """Exponents contributed when going from n-1 to n."""
        return sorted(a + self.modulus * (n - 1) for a in self.offsets)


def borwein_family(delta: int = 1) -> Family:
    return Family(f"borwein-delta{delta}", 3, (1, 2), delta)


def modk_family(K: int, delta: int = 1) -> Family:
    return Family(f"mod{K}-delta{delta}", K, tuple(range(1, K)), delta)


def iks_family(K: int, a: int) -> Family:
    return Family(f"iks-K{K}-a{a}", K, tuple(sorted({a, K - a})), 1)


@dataclass
class ScanRow:
    n: int
    violations: list[Violation]
    checked_range: tuple[int, int]

    def as_dict(self, family: str) -> dict:
        return {
            "family": family,
            "n": self.n,
            "violations": [v.as_dict() for v in self.violations],
            "checked_range": list(self.checked_range),
        }


def _scan_chunk(family: Family, rule_builder: Callable[[int], SignRule],
                ns: Sequence[int], m_limit: int | None) -> list[ScanRow]:
    """Scan consecutive n, extending one product incrementally."""
    n_hi = ns[-1]
    all_exps = [(e, family.delta) for k in range(1, n_hi + 1) for e in family.exponents_at(k)]
    trunc = m_limit
    width = width_for_bits(log2_coeff_bound(all_exps, trunc))
    poly = PackedPoly.one(width, None if trunc is None else trunc + 1)
    done = 0
    rows = []
    for n in ns:
        for k in range(done + 1, n + 1):
            for e in family.exponents_at(k):
                poly.mul_binomial(e, family.delta)
        done = n
        rule = rule_builder(n)
        top = poly.length - 1
        lo, hi = rule.m_range if rule.m_range is not None else (0, family.degree(n))
        hi = min(hi, family.degree(n))
        if m_limit is not None:
            hi = min(hi, m_limit)
        signs = poly.signs()
        bad = _bad_indices(signs, rule, lo, min(hi, top))
        coeffs = poly.to_ints([m for m, _ in bad]) if bad else []
        viol = [Violation(m, m % rule.modulus, c, sign) for (m, sign), c in zip(bad, coeffs)]
        rows.append(ScanRow(n, viol, (lo, hi)))
    return rows


def default_workers() -> int:
    env = os.environ.get("BORWEIN_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def scan_family(family: Family, rule_builder: Callable[[int], SignRule],
                n_range: Iterable[int], m_limit: int | None = None,
                workers: int | None = None) -> list[ScanRow]:
    """Per-n violation lists, ordered by n.

    Consecutive n are handled by one worker that grows a single product, so
    memory stays at one polynomial per worker.
    """
    ns = sorted(set(int(n) for n in n_range))
    if not ns:
        return []
    if ns[0] < 1:
        raise ContractError("n must be >= 1")
    workers = default_workers() if workers is None else max(1, workers)
    workers = min(workers, len(ns))
    if workers == 1:
        return _scan_chunk(family, rule_builder, ns, m_limit)
    # balance chunks by total work (roughly n^3 per full expansion step)
    chunks = _split_balanced(ns, workers)
    job = partial(_scan_chunk, family, rule_builder, m_limit=m_limit)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(job, chunks))
    return [row for part in parts for row in part]


def _split_balanced(ns: list[int], k: int) -> list[list[int]]:
    weights = np.array([n ** 3 for n in ns], dtype=float)
    total = weights.sum()
    chunks, cur, acc = [], [], 0.0
    for n, w in zip(ns, weights):
        cur.append(n)
        acc += w
        if acc >= total / k and len(chunks) < k - 1:
            chunks.append(cur)
            cur, acc = [], 0.0
    if cur:
        chunks.append(cur)
    return chunks


def scan_report(family: Family, rows: Sequence[ScanRow]) -> str:
    return json.dumps([row.as_dict(family.name) for row in rows], indent=1)
