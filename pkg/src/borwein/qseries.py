"""Exact truncated power series and the q-product families built from them.

Everything here is integer arithmetic.  ``TruncatedSeries`` is the value type
handed between modules; the heavy products run on the packed representation
in ``_packed`` and are decoded once at the end.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._packed import PackedPoly, log2_coeff_bound, width_for_bits
from .errors import ContractError, InvalidSpecError

INFINITE = math.inf


@dataclass(frozen=True)
class TruncatedSeries:
    """Integer power series known exactly up to and including q^trunc.

    ``exact_degree`` marks a complete polynomial (coefficients beyond it are
    zero, not unknown).  The zero polynomial uses ``exact_degree = -1``.
    """

    coeffs: tuple[int, ...]
    trunc: int
    exact_degree: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != self.trunc + 1:
            raise ContractError("len(coeffs) must equal trunc + 1")
        d = self.exact_degree
        if d is not None:
            if d >= 0 and (d > self.trunc or self.coeffs[d] == 0):
                raise ContractError("exact_degree must index a nonzero coefficient")
            if any(self.coeffs[max(d, -1) + 1:]):
                raise ContractError("coefficients above exact_degree must vanish")

    @classmethod
    def polynomial(cls, coeffs: Sequence[int], label: str = "") -> "TruncatedSeries":
        """Exact polynomial from a coefficient list (trailing zeros dropped)."""
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            return cls((0,), 0, -1, label)
        return cls(tuple(cs), len(cs) - 1, len(cs) - 1, label)

    @classmethod
    def series(cls, coeffs: Sequence[int], label: str = "") -> "TruncatedSeries":
        return cls(tuple(coeffs), len(coeffs) - 1, None, label)

    @property
    def is_exact(self) -> bool:
        return self.exact_degree is not None

    @property
    def order(self) -> float:
        """Highest exponent whose coefficient is known (infinite for polynomials)."""
        return INFINITE if self.is_exact else self.trunc

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m: int) -> int:
        return self.coefficient(m)

    def coefficient(self, m: int) -> int:
        if m < 0:
            return 0
        if m > self.trunc:
            if self.is_exact:
                return 0
            raise ContractError(f"q^{m} lies beyond the truncation order {self.trunc}")
        return self.coeffs[m]

    def truncate(self, t: int) -> "TruncatedSeries":
        if t < 0:
            raise ContractError("truncation order must be >= 0")
        if not self.is_exact and t > self.trunc:
            raise ContractError("cannot extend a truncated series")
        cs = [self.coefficient(m) for m in range(t + 1)]
        return TruncatedSeries(tuple(cs), t, None, self.label)

    def _known(self, t: int) -> list[int]:
        return [self.coefficient(m) for m in range(t + 1)]

    def _result(self, cs: list[int], order: float, label: str = "") -> "TruncatedSeries":
        if order == INFINITE:
            return TruncatedSeries.polynomial(cs, label)
        t = int(order)
        cs = (cs + [0] * (t + 1))[:t + 1]
        return TruncatedSeries(tuple(cs), t, None, label)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = min(self.order, other.order)
        t = int(order) if order != INFINITE else max(self.trunc, other.trunc)
        a, b = self._known(t), other._known(t)
        return self._result([x + y for x, y in zip(a, b)], order)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.trunc,
                               self.exact_degree, self.label)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        # an exact polynomial never limits the order of a product
        order = min(self.order, other.order)
        a = list(self.coeffs) if self.is_exact else self._known(int(order))
        b = list(other.coeffs) if other.is_exact else other._known(int(order))
        return self._result(multiply_lists(a, b, None if order == INFINITE else int(order)), order)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by q^k (k >= 0)."""
        cs = [0] * k + list(self.coeffs)
        if self.is_exact:
            return TruncatedSeries.polynomial(cs, self.label)
        return TruncatedSeries(tuple(cs), self.trunc + k, None, self.label)

    def scale(self, c: int) -> "TruncatedSeries":
        cs = [c * x for x in self.coeffs]
        if self.is_exact:
            return TruncatedSeries.polynomial(cs, self.label)
        return TruncatedSeries(tuple(cs), self.trunc, None, self.label)

    def substitute_power(self, k: int) -> "TruncatedSeries":
        """Series in q^k: coefficient j moves to exponent j*k."""
        cs = [0] * (self.trunc * k + 1)
        for j, c in enumerate(self.coeffs):
            cs[j * k] = c
        if self.is_exact:
            return TruncatedSeries.polynomial(cs, self.label)
        # only exponents up to trunc*k + k - 1 are known (all other residues are zero)
        return TruncatedSeries(tuple(cs + [0] * (k - 1)), self.trunc * k + k - 1, None, self.label)

    def with_label(self, label: str) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, self.trunc, self.exact_degree, label)

    # serialisation
    def to_csv(self) -> str:
        lines = ["m,coefficient"]
        lines += [f"{m},{c}" for m, c in enumerate(self.coeffs)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        env = {
            "label": self.label,
            "trunc": self.trunc,
            "exact_degree": self.exact_degree,
            "coeffs": [str(c) for c in self.coeffs],
        }
        return json.dumps(env)

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        env = json.loads(text)
        return cls(tuple(int(c) for c in env["coeffs"]), env["trunc"],
                   env["exact_degree"], env.get("label", ""))


def multiply_lists(a: Sequence[int], b: Sequence[int], trunc: int | None) -> list[int]:
    """Exact product of two coefficient lists, optionally cut at q^trunc."""
    if not a or not b:
        return []
    if trunc is not None:
        a, b = a[:trunc + 1], b[:trunc + 1]
    ma = max(abs(c) for c in a)
    mb = max(abs(c) for c in b)
    if ma == 0 or mb == 0:
        return [0] * (len(a) + len(b) - 1 if trunc is None else min(len(a) + len(b) - 1, trunc + 1))
    bound = ma * mb * min(len(a), len(b))
    width = width_for_bits(bound.bit_length())
    cap = None if trunc is None else trunc + 1
    pa = PackedPoly.from_coeffs(a, width, cap)
    pb = PackedPoly.from_coeffs(b, width, cap)
    pa.mul(pb)
    return pa.to_ints()


# --------------------------------------------------------------------------
# product descriptions

@dataclass(frozen=True)
class Factor:
    """(q^offset; q^K)_length raised to ``multiplicity`` (negative divides)."""

    offset: Fraction
    multiplicity: int
    length: float  # int or INFINITE


@dataclass(frozen=True)
class ProductSpec:
    """prod_j (q^{a_j}; q^K)_{L_j}^{d_j}.

    Offsets satisfy 0 < a_j <= K; a_j == K is allowed so that (q^K;q^K)
    factors can be written directly.
    """

    modulus: int
    factors: tuple[Factor, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidSpecError("modulus must be positive")
        fs = []
        for f in self.factors:
            if not isinstance(f, Factor):
                f = Factor(*f)
            off = Fraction(f.offset)
            if off.denominator != 1:
                raise InvalidSpecError(f"offset {off} does not give integer exponents")
            if not 0 < off <= self.modulus:
                raise InvalidSpecError(f"offset {off} not in (0, {self.modulus}]")
            if f.multiplicity == 0:
                raise InvalidSpecError("multiplicity must be nonzero")
            if f.length != INFINITE and (int(f.length) != f.length or f.length < 0):
                raise InvalidSpecError("length must be a nonnegative integer or INFINITE")
            length = f.length if f.length == INFINITE else int(f.length)
            fs.append(Factor(off, int(f.multiplicity), length))
        object.__setattr__(self, "factors", tuple(fs))

    def exponents(self, trunc: int | None) -> list[tuple[int, int]]:
        """(exponent, multiplicity) pairs, sorted, dropping exponents > trunc."""
        out: dict[int, int] = {}
        for f in self.factors:
            a = int(f.offset)
            if f.length == INFINITE:
                if trunc is None:
                    raise InvalidSpecError("infinite factor needs a truncation order")
                # least L with a + K*L > trunc
                length = max(0, (trunc - a) // self.modulus + 1)
            else:
                length = int(f.length)
            for i in range(length):
                e = a + self.modulus * i
                if trunc is not None and e > trunc:
                    break
                out[e] = out.get(e, 0) + f.multiplicity
        return sorted((e, k) for e, k in out.items() if k != 0)

    @property
    def finite(self) -> bool:
        return all(f.length != INFINITE and f.multiplicity > 0 for f in self.factors)

    def degree(self) -> int:
        if not self.finite:
            raise InvalidSpecError("only finite products have a degree")
        return sum(e * k for e, k in self.exponents(None))


def borwein_spec(n: int, delta: int = 1) -> ProductSpec:
    """P_n^delta = (q;q^3)_n^delta (q^2;q^3)_n^delta."""
    return ProductSpec(3, (Factor(1, delta, n), Factor(2, delta, n)), f"P_{n}^{delta}")


def modk_spec(K: int, n: float, delta: int = 1) -> ProductSpec:
    """(q;q)_{Kn}^delta / (q^K;q^K)_n^delta written without division."""
    return ProductSpec(K, tuple(Factor(a, delta, n) for a in range(1, K)),
                       f"(q;q)_{{{K}n}}/(q^{K};q^{K})_n, n={n}, delta={delta}")


def paired_spec(K: int, offsets: Iterable[int], n: float, delta: int = 1) -> ProductSpec:
    """prod_j (q^a_j;q^K)_n (q^{K-a_j};q^K)_n, each to the power delta."""
    fs = []
    for a in offsets:
        fs.append(Factor(a, delta, n))
        if 2 * a != K:
            fs.append(Factor(K - a, delta, n))
    return ProductSpec(K, tuple(fs), f"K={K} offsets={list(offsets)} n={n}")


def infinite_borwein_spec(delta: int = 1) -> ProductSpec:
    return modk_spec(3, INFINITE, delta)


def _packed_product(exps: list[tuple[int, int]], trunc: int | None,
                    width: int | None = None) -> PackedPoly:
    if width is None:
        width = width_for_bits(log2_coeff_bound(exps, trunc))
    p = PackedPoly.one(width, None if trunc is None else trunc + 1)
    for e, k in exps:
        if k > 0:
            p.mul_binomial(e, k)
        else:
            p.div_binomial(e, -k)
    return p


def general_product(spec: ProductSpec, trunc: int | None = None) -> TruncatedSeries:
    """Expand a product description exactly up to q^trunc.

    With ``trunc=None`` the product must be a finite polynomial and the
    full polynomial is returned.
    """
    if trunc is None:
        if not spec.finite:
            raise InvalidSpecError("infinite or divided products need a truncation order")
        exps = spec.exponents(None)
        coeffs = _packed_product(exps, None).to_ints()
        return TruncatedSeries.polynomial(coeffs, spec.label)
    if trunc < 0:
        raise ContractError("trunc must be >= 0")
    exps = spec.exponents(trunc)
    p = _packed_product(exps, trunc)
    cs = p.to_ints()
    cs += [0] * (trunc + 1 - len(cs))
    return TruncatedSeries(tuple(cs), trunc, None, spec.label)


def borwein_poly(n: int, delta: int = 1, trunc: int | None = None) -> TruncatedSeries:
    """P_n(q)^delta, the full polynomial or its truncation."""
    if n < 1:
        raise ContractError("n must be >= 1")
    if delta < 1:
        raise ContractError("delta must be >= 1")
    spec = borwein_spec(n, delta)
    if trunc is not None and trunc >= 3 * delta * n * n:
        trunc = None
    return general_product(spec, trunc)


def q_pochhammer(offset: int, K: int, length: float, trunc: int,
                 power: int = 1) -> TruncatedSeries:
    """(q^offset; q^K)_length ** power truncated at q^trunc."""
    return general_product(ProductSpec(K, (Factor(offset, power, length),)), trunc)


def theta_difference_bbg(trunc: int) -> TruncatedSeries:
    """sum q^{3Q(m,n)} - q sum q^{3(Q(m,n)+m+n)} with Q = m^2+mn+n^2.

    Q >= (m^2+n^2)/2, so |m|, |n| <= ceil(sqrt(trunc)) + 2 covers every term
    with exponent <= trunc in both sums.
    """
    if trunc < 0:
        raise ContractError("trunc must be >= 0")
    cs = [0] * (trunc + 1)
    b = math.isqrt(trunc) + 3
    for m in range(-b, b + 1):
        for k in range(-b, b + 1):
            quad = m * m + m * k + k * k
            e = 3 * quad
            if e <= trunc:
                cs[e] += 1
            e = 3 * (quad + m + k) + 1
            if e <= trunc:
                cs[e] -= 1
    return TruncatedSeries(tuple(cs), trunc, None, "theta difference")


def andrews_mod3_infinite(trunc: int) -> TruncatedSeries:
    """Numerator of the infinite Borwein product in Andrews' form.

    (q^12,q^15,q^27;q^27) - q(q^6,q^21,q^27;q^27) - q^2(q^3,q^24,q^27;q^27);
    dividing by (q^3;q^3)_oo gives P_oo.
    """
    def triple(a, b):
        spec = ProductSpec(27, (Factor(a, 1, INFINITE), Factor(b, 1, INFINITE),
                                Factor(27, 1, INFINITE)))
        return general_product(spec, trunc)

    out = triple(12, 15)
    out = out - triple(6, 21).shift(1).truncate(trunc)
    out = out - triple(3, 24).shift(2).truncate(trunc)
    return out.with_label("Andrews numerator")


def kane_square_numerator(trunc: int) -> TruncatedSeries:
    """(q;q)_oo^2 / (q^3;q^3)_oo."""
    spec = ProductSpec(3, (Factor(1, 2, INFINITE), Factor(2, 2, INFINITE),
                           Factor(3, 1, INFINITE)))
    return general_product(spec, trunc).with_label("(q;q)^2/(q^3;q^3)")


def qbinomial(A: int, B: int, trunc: int | None = None) -> TruncatedSeries:
    """Gaussian binomial [A choose B]_q (zero outside 0 <= B <= A)."""
    if A < 0 or B < 0 or B > A:
        poly = TruncatedSeries.polynomial([])
    else:
        B = min(B, A - B)
        deg = B * (A - B)
        exps: dict[int, int] = {}
        for i in range(1, B + 1):
            exps[A - B + i] = exps.get(A - B + i, 0) + 1
            exps[i] = exps.get(i, 0) - 1
        pairs = sorted((e, k) for e, k in exps.items() if k != 0)
        # exact: the quotient is a polynomial of degree deg
        cs = _packed_product(pairs, deg).to_ints()
        poly = TruncatedSeries.polynomial(cs)
    if trunc is not None:
        return poly.truncate(trunc)
    return poly


def bressoud_sum(M: int, N: int, K: int, alphaK: int, betaK: int) -> TruncatedSeries:
    """sum_j (-1)^j q^{j(K(a+b)j + K(a-b))/2} [M+N, M+Kj]_q with a=alphaK/K, b=betaK/K."""
    if M < 0 or N < 0 or K < 1:
        raise InvalidSpecError("need M, N >= 0 and K >= 1")
    if alphaK <= 0 or betaK <= 0:
        raise InvalidSpecError("alpha and beta must be positive")
    total = TruncatedSeries.polynomial([])
    jlo = -(M // K)
    jhi = N // K
    for j in range(jlo, jhi + 1):
        num = j * ((alphaK + betaK) * j + (alphaK - betaK))
        if num % 2:
            raise InvalidSpecError(f"non-integral exponent at j={j}")
        e = num // 2
        if e < 0:
            raise InvalidSpecError(f"negative exponent at j={j}")
        term = qbinomial(M + N, M + K * j).shift(e)
        total = total + (term if j % 2 == 0 else -term)
    return total.with_label(f"Bressoud(M={M},N={N},K={K},aK={alphaK},bK={betaK})")


def residue_decompose(s: TruncatedSeries, K: int) -> list[TruncatedSeries]:
    """Split s = sum_r q^r C_r(q^K); returns [C_0, ..., C_{K-1}]."""
    if K < 1:
        raise ContractError("K must be positive")
    out = []
    for r in range(K):
        cs = list(s.coeffs[r::K])
        if s.is_exact:
            out.append(TruncatedSeries.polynomial(cs))
        else:
            out.append(TruncatedSeries(tuple(cs), len(cs) - 1, None))
    return out


def recombine(parts: Sequence[TruncatedSeries], K: int) -> TruncatedSeries:
    """Inverse of residue_decompose."""
    total = None
    for r, c in enumerate(parts):
        term = c.substitute_power(K).shift(r)
        total = term if total is None else total + term
    return total
