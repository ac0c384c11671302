"""Grid suprema with derivative-based slack."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ContractError


@dataclass(frozen=True)
class GridCertificate:
    a: float
    b: float
    M: int
    grid_max: float
    argmax: float
    derivative_bound: float
    certified_sup: float


def _evaluate(f, xs: np.ndarray) -> np.ndarray:
    try:
        ys = np.asarray(f(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except (TypeError, ValueError):
        pass
    return np.array([f(x) for x in xs], dtype=float)


def certified_sup(f: Callable, derivative_bound: float, a: float, b: float,
                  M: int = 10 ** 5) -> GridCertificate:
    """sup f on [a, b] <= max over M+1 equispaced points + (b-a)/M * sup|f'|.

    ``f`` may be vectorised; ``derivative_bound`` must dominate |f'| on [a, b].
    """
    if M < 2:
        raise ContractError("need M >= 2")
    if derivative_bound < 0:
        raise ContractError("derivative bound must be >= 0")
    xs = np.linspace(a, b, M + 1)
    ys = _evaluate(f, xs)
    i = int(np.argmax(ys))
    slack = (b - a) / M * derivative_bound
    return GridCertificate(a, b, M, float(ys[i]), float(xs[i]), float(derivative_bound),
                           float(ys[i] + slack))


def certified_sup_local(f: Callable, lipschitz: Callable, a: float, b: float,
                        M: int = 10 ** 5, target: float = 1e-4,
                        max_rounds: int = 40) -> GridCertificate:
    """Grid supremum with a per-cell Lipschitz bound and adaptive refinement.

    ``lipschitz(lo, hi)`` must bound |f'| on [lo, hi] (vectorised over cell
    arrays).  On a cell, sup f <= (f(lo) + f(hi))/2 + L (hi - lo)/2.  Cells
    whose bound exceeds the best grid value by more than ``target`` are
    split until none remain (or ``max_rounds`` is hit), so the returned
    certificate is usually within ``target`` of the grid maximum.
    """
    if M < 2:
        raise ContractError("need M >= 2")
    xs = np.linspace(a, b, M + 1)
    ys = _evaluate(f, xs)
    lo, hi = xs[:-1], xs[1:]
    flo, fhi = ys[:-1], ys[1:]
    best = float(np.max(ys))
    arg = float(xs[int(np.argmax(ys))])
    settled = -np.inf
    dmax = 0.0
    for _ in range(max_rounds):
        L = np.asarray(lipschitz(lo, hi), dtype=float)
        dmax = max(dmax, float(np.max(L)) if L.size else 0.0)
        bound = 0.5 * (flo + fhi) + 0.5 * L * (hi - lo)
        keep = bound > best + target
        if keep.any():
            settled = max(settled, float(np.max(bound[~keep])) if (~keep).any() else -np.inf)
        else:
            settled = max(settled, float(np.max(bound)))
            lo = hi = flo = fhi = np.empty(0)
            break
        lo, hi, flo, fhi = lo[keep], hi[keep], flo[keep], fhi[keep]
        # split every open cell into 8
        parts = 8
        t = np.linspace(0.0, 1.0, parts + 1)
        grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        inner = grid[:, 1:-1]
        finner = _evaluate(f, inner.ravel()).reshape(inner.shape)
        vals = np.concatenate([flo[:, None], finner, fhi[:, None]], axis=1)
        j = np.unravel_index(np.argmax(finner), finner.shape) if finner.size else None
        if finner.size and finner[j] > best:
            best = float(finner[j])
            arg = float(inner[j])
        lo, hi = grid[:, :-1].ravel(), grid[:, 1:].ravel()
        flo, fhi = vals[:, :-1].ravel(), vals[:, 1:].ravel()
    if lo.size:
        L = np.asarray(lipschitz(lo, hi), dtype=float)
        settled = max(settled, float(np.max(0.5 * (flo + fhi) + 0.5 * L * (hi - lo))))
    return GridCertificate(a, b, M, best, arg, dmax, max(settled, best))


def certified_sup_cells(f: Callable, cell_bound: Callable, a: float, b: float,
                        M: int = 10 ** 5) -> GridCertificate:
    """Supremum from a caller-supplied upper bound on each grid cell.

    ``cell_bound(lo, hi)`` (vectorised) must dominate f on [lo, hi].  Handy
    when f is a product of monotone factors: take each factor at whichever
    end of the cell makes it largest.
    """
    if M < 2:
        raise ContractError("need M >= 2")
    xs = np.linspace(a, b, M + 1)
    ys = _evaluate(f, xs)
    i = int(np.argmax(ys))
    cells = np.asarray(cell_bound(xs[:-1], xs[1:]), dtype=float)
    top = float(np.max(cells))
    slope = top - float(ys[i])
    return GridCertificate(a, b, M, float(ys[i]), float(xs[i]),
                           slope * M / (b - a), max(top, float(ys[i])))
