"""Min-max spectral values from sublevel filtration homology.

The k-th value is the k-th smallest birth of an essential class of the
relative pair (total space, collapsed bottom); homology degrees are
reported after shifting down by the negative index of the quadratic form,
so a fiber stabilization leaves the reported degrees unchanged.
Coefficients are the two-element field throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exprs
from .exprs import Expr, parse
from .families import GeneratingFamily, critical_points, fiber_roots_at
from .filtration import (
    FiltrationBounds,
    RegularityError,
    build_filtration,
    region_arcs,
    region_mask,
)
from .jets import TWO_PI
from .persistence import reduce_filtration

__all__ = [
    "SpectrumError",
    "ViterboSpectrum",
    "GeneralizedCriticalValue",
    "viterbo_numbers",
    "viterbo_numbers_with_boundary",
    "betti_of_region",
    "generalized_critical_values",
]


class SpectrumError(RuntimeError):
    """The essential class count disagrees with the expected homology rank."""


@dataclass
class ViterboSpectrum:
    """Ordered min-max values with their witnessing homology degrees."""

    values: list
    degrees: list            # degree of the witnessing class, shifted by -index
    boundary_attained: list  # birth witness sits within one cell of the region boundary
    index_shift: int
    b: int
    bounds: FiltrationBounds
    witnesses: list          # (q, w, value) vertex witnessing each birth

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.size > 1 and np.any(np.diff(vals) < 0):
            raise AssertionError("spectral values must be weakly increasing")

    def __len__(self):
        return len(self.values)


def _spectrum_from_complex(X, expected_b: int) -> ViterboSpectrum:
    res = reduce_filtration(X)
    ess = res.essentials
    if len(ess) != expected_b:
        raise SpectrumError(
            f"expected {expected_b} essential classes, found {len(ess)}; "
            "the grid is too coarse or the collapsed bottom is misplaced")
    values = [e.birth for e in ess]
    degrees = [e.dim - X.quad_index for e in ess]
    boundary = [bool(X.boundary_adjacent[e.cell]) for e in ess]
    witnesses = [X.birth_vertex(e.cell) for e in ess]
    return ViterboSpectrum(values=values, degrees=degrees, boundary_attained=boundary,
                           index_shift=X.quad_index, b=expected_b, bounds=X.bounds,
                           witnesses=witnesses)


def viterbo_numbers(family: GeneratingFamily, n_q: int = 256, n_w: int = 65) -> ViterboSpectrum:
    """The two min-max values over the whole circle (b = dim H_*(S^1) = 2).

    For K = 0 these are exactly the grid minimum and maximum of F.
    """
    X = build_filtration(family, n_q=n_q, n_w=n_w, region_f=None)
    return _spectrum_from_complex(X, expected_b=2)


def betti_of_region(f, n_q: int = 256) -> int:
    """Total Betti number over the two-element field of {f >= 0}: the number
    of arcs, or 2 when f >= 0 on the whole circle."""
    mask = region_mask(f, n_q)
    if not mask.any():
        raise ValueError("region {f >= 0} contains no grid point")
    if mask.all():
        return 2
    return len(region_arcs(mask))


def viterbo_numbers_with_boundary(family: GeneratingFamily, f, n_q: int = 256,
                                  n_w: int = 65) -> ViterboSpectrum:
    """Min-max values of F restricted to {f >= 0} x fiber ball, b(f) of them."""
    b = betti_of_region(f, n_q=n_q)
    X = build_filtration(family, n_q=n_q, n_w=n_w, region_f=f)
    return _spectrum_from_complex(X, expected_b=b)


@dataclass(frozen=True)
class GeneralizedCriticalValue:
    value: float
    kind: str  # "interior" or "boundary"
    q: float
    w: tuple


def _boundary_roots(f: Expr, n_q: int, tol: float = 1e-12):
    """Zeros of f on the circle, located by grid sign changes + Newton."""
    qs = np.arange(n_q) * TWO_PI / n_q
    fv = np.broadcast_to(np.asarray(exprs.evaluate(f, {"q": qs}), dtype=float), qs.shape)
    df = exprs.differentiate(f, "q")
    roots = []
    for i in range(n_q):
        a, b = fv[i], fv[(i + 1) % n_q]
        if a == 0.0:
            roots.append(float(qs[i]))
            continue
        if a * b < 0:
            x = float(qs[i]) + (a / (a - b)) * (TWO_PI / n_q)
            for _ in range(60):
                val = float(exprs.evaluate(f, {"q": x}))
                if abs(val) < tol:
                    break
                der = float(exprs.evaluate(df, {"q": x}))
                if der == 0.0:
                    break
                x -= val / der
            roots.append(x % TWO_PI)
    roots.sort()
    dedup = []
    for r in roots:
        if not dedup or min(abs(r - dedup[-1]), TWO_PI - abs(r - dedup[-1])) > 1e-9:
            dedup.append(r)
    if len(dedup) > 1 and TWO_PI - abs(dedup[-1] - dedup[0]) < 1e-9:
        dedup.pop()
    return dedup


def generalized_critical_values(family: GeneratingFamily, f, n_q: int = 256,
                                tol_newton: float = 1e-10):
    """Interior critical values of F on {f >= 0} plus critical values of the
    restriction of F to the boundary fibers, sorted by value."""
    f = f if isinstance(f, Expr) else parse(f, fiber_dim=0)
    region_mask(f, n_q)  # regularity check
    out = []
    for cp in critical_points(family, n_q=n_q, tol_newton=tol_newton):
        if cp.degenerate and np.isnan(cp.q):
            # constant-in-q level: present above every interior point
            out.append(GeneralizedCriticalValue(cp.value, "interior", cp.q, cp.w))
            continue
        if float(exprs.evaluate(f, {"q": cp.q})) > 0.0:
            out.append(GeneralizedCriticalValue(cp.value, "interior", cp.q, cp.w))
    for q0 in _boundary_roots(f, n_q):
        if family.fiber_dim == 0:
            out.append(GeneralizedCriticalValue(
                float(family.value(q0)), "boundary", q0, ()))
        else:
            for w, det in fiber_roots_at(family, q0, tol_newton=tol_newton):
                out.append(GeneralizedCriticalValue(
                    float(family.value(q0, np.asarray(w))), "boundary", q0, w))
    out.sort(key=lambda g: (g.value, g.kind))
    return out
