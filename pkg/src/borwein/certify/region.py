"""The region S_rho = {R e^{i T}: 0 <= R <= 1, |T| <= rho (-log R) / (1 - R)}.

Powers r^k e^{ik theta} on the peak arc stay inside it, so kernel bounds
over S_rho control the derivative sums.  By the maximum modulus principle
the supremum of an analytic function over S_rho sits on its boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .. import saddle
from ..errors import DomainError


@dataclass(frozen=True)
class RegionS:
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError("rho must be positive")

    def angle_limit(self, R):
        """rho (-log R) / (1 - R), with the limit rho at R = 1."""
        R = np.asarray(R, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lim = self.rho * (-np.log(R)) / (1.0 - R)
        return np.where(R >= 1.0, self.rho, np.where(R <= 0.0, np.inf, lim))

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        R = np.abs(z)
        T = np.abs(np.angle(z))
        return (R <= 1.0) & ((R == 0) | (T <= self.angle_limit(np.where(R == 0, 1.0, R)) + 1e-15))

    @property
    def r_min(self) -> float:
        """Radius below which the angle limit exceeds pi (full disc)."""
        if self.rho >= math.pi:
            return 1.0
        g = lambda R: self.rho * (-math.log(R)) / (1.0 - R) - math.pi
        return brentq(g, 1e-300, 1.0 - 1e-15)

    def boundary(self, samples: int = 20001) -> np.ndarray:
        """Points on the upper half of the boundary (the set is symmetric)."""
        r0 = self.r_min
        R = r0 + (1.0 - r0) * (1.0 - np.cos(np.linspace(0, math.pi / 2, samples)))
        R = np.clip(R, r0, 1.0)
        R[-1] = 1.0
        T = np.minimum(self.angle_limit(R), math.pi)
        curve = R * np.exp(1j * T)
        arc = np.exp(1j * np.linspace(0.0, self.rho, samples))
        return np.concatenate([curve, arc])


def sup_kernel_on_region(j: int, kind: str, rho: float, samples: int = 20001) -> float:
    """Bound for sup |u_j(z)/z| (or v_j) over S_rho.

    Maximum over a dense boundary sample plus the largest jump between
    neighbouring samples.  This is a heuristic slack, not a proof.
    """
    region = RegionS(rho)
    z = region.boundary(samples)
    f = np.abs(saddle.u(j, z) / z) if kind == "u" else np.abs(saddle.v(j, z) / z)
    half = len(z) // 2
    jumps = max(np.max(np.abs(np.diff(f[:half]))), np.max(np.abs(np.diff(f[half:]))))
    return float(np.max(f) + jumps)
