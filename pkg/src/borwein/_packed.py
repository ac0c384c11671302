"""Polynomials with big-integer coefficients packed into one Python int.

A polynomial sum c_i q^i is stored as the integer sum c_i * 2**(i*bits) with
signed digits.  Multiplying by (1 - q^e) is then a single shift and subtract,
which is far cheaper than touching every coefficient as a separate object.
The digit width must exceed every intermediate coefficient, so callers size
it from an a-priori bound (see ``log2_coeff_bound``).
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ResourceError

# Packed integers larger than this are refused up front.
MAX_BYTES = 1 << 31


@lru_cache(maxsize=64)
def _bias(bits: int, slots: int) -> int:
    # half-range offset in every digit: makes all digits non-negative
    return (1 << (bits - 1)) * (((1 << (slots * bits)) - 1) // ((1 << bits) - 1))


def width_for_bits(log2_bound: float) -> int:
    """Bytes per digit so that |c| < 2**(bits-1) for |c| <= 2**log2_bound."""
    return max(1, math.ceil((log2_bound + 2.0) / 8.0))


def log2_coeff_bound(factors: Iterable[tuple[int, int]], trunc: int | None) -> float:
    """Upper bound for log2 max |[q^m] prod (1-q^e)^mult| over m <= trunc.

    Every coefficient is dominated by the matching coefficient of the
    majorant prod (1+x^e)^mult (or 1/(1-x^e)^|mult| for division), and
    that one is at most x^-T times the majorant at any 0 < x <= 1.  The
    exponent is convex in log x so a bounded scalar minimisation finds it.
    """
    facs = [(e, k) for e, k in factors if k != 0]
    if not facs:
        return 0.0
    has_div = any(k < 0 for _, k in facs)
    if trunc is None:
        if has_div:
            raise ValueError("division needs a finite truncation")
        trunc = sum(e * k for e, k in facs) // 2
    elif not has_div:
        trunc = min(trunc, sum(e * k for e, k in facs) // 2)
    es = np.array([e for e, _ in facs], dtype=float)
    ks = np.array([k for _, k in facs], dtype=float)
    pos = ks > 0

    def logm(u: float) -> float:
        xe = np.exp(u * es)
        out = -trunc * u
        out += float(np.sum(ks[pos] * np.log1p(xe[pos])))
        out += float(np.sum(-ks[~pos] * -np.log1p(-xe[~pos]))) if (~pos).any() else 0.0
        return out

    at_one = math.inf if has_div else logm(0.0)
    hi = -1e-12 if has_div else 0.0
    res = minimize_scalar(logm, bounds=(-60.0, hi), method="bounded",
                          options={"xatol": 1e-10})
    best = min(at_one, float(res.fun))
    return max(best, 0.0) / math.log(2.0) + 1.0


class PackedPoly:
    """Mutable packed polynomial; ``cap`` slots kept when truncating."""

    __slots__ = ("value", "width", "bits", "length", "cap")

    def __init__(self, value: int, width: int, length: int, cap: int | None):
        self.value = value
        self.width = width
        self.bits = 8 * width
        self.length = length
        self.cap = cap
        self._check_size(length)

    def _check_size(self, slots: int) -> None:
        if slots * self.width > MAX_BYTES:
            raise ResourceError(
                f"packed polynomial needs {slots * self.width} bytes")

    @classmethod
    def one(cls, width: int, cap: int | None = None) -> "PackedPoly":
        return cls(1, width, 1, cap)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], width: int,
                    cap: int | None = None) -> "PackedPoly":
        pos = b"".join((c if c > 0 else 0).to_bytes(width, "little") for c in coeffs)
        neg = b"".join((-c if c < 0 else 0).to_bytes(width, "little") for c in coeffs)
        value = int.from_bytes(pos, "little") - int.from_bytes(neg, "little")
        p = cls(value, width, max(len(coeffs), 1), cap)
        p._truncate()
        return p

    def copy(self) -> "PackedPoly":
        return PackedPoly(self.value, self.width, self.length, self.cap)

    def _truncate(self) -> None:
        if self.cap is not None and self.length > self.cap:
            bias = _bias(self.bits, self.cap)
            mask = (1 << (self.cap * self.bits)) - 1
            self.value = ((self.value + bias) & mask) - bias
            self.length = self.cap

    def mul_binomial(self, e: int, times: int = 1) -> None:
        """Multiply in place by (1 - q^e)**times."""
        if self.cap is not None and e >= self.cap:
            return
        shift = e * self.bits
        for _ in range(times):
            self._check_size(self.length + e)
            self.value -= self.value << shift
            self.length += e
            self._truncate()

    def div_binomial(self, e: int, times: int = 1) -> None:
        """Multiply in place by (1 - q^e)**(-times), truncated at cap."""
        if self.cap is None:
            raise ValueError("division needs a truncation order")
        if e >= self.cap:
            return
        for _ in range(times):
            # 1/(1-x) = (1+x)(1+x^2)(1+x^4)... up to the truncation order
            step = e
            self.length = self.cap
            while step < self.cap:
                self.value += self.value << (step * self.bits)
                self.length = self.cap + step
                self._truncate()
                step *= 2

    def mul(self, other: "PackedPoly") -> None:
        if other.width != self.width:
            raise ValueError("width mismatch")
        caps = [c for c in (self.cap, other.cap) if c is not None]
        self.cap = min(caps) if caps else None
        self._check_size(self.length + other.length)
        self.value *= other.value
        self.length = self.length + other.length - 1
        self._truncate()

    def _digits(self) -> bytes:
        bias = _bias(self.bits, self.length)
        return (self.value + bias).to_bytes(self.length * self.width, "little")

    def signs(self) -> np.ndarray:
        """Sign (-1, 0, 1) of every stored coefficient, without decoding."""
        arr = np.frombuffer(self._digits(), dtype=np.uint8).reshape(self.length, self.width)
        top = arr[:, -1]
        if self.width > 1:
            low = arr[:, :-1].any(axis=1)
        else:
            low = np.zeros(self.length, dtype=bool)
        zero = (top == 0x80) & ~low
        out = np.where(top >= 0x80, 1, -1).astype(np.int8)
        out[zero] = 0
        return out

    def to_ints(self, indices: Iterable[int] | None = None) -> list[int]:
        buf = self._digits()
        w = self.width
        half = 1 << (self.bits - 1)
        idx = range(self.length) if indices is None else indices
        return [int.from_bytes(buf[i * w:(i + 1) * w], "little") - half for i in idx]
