"""Identification of circle jets with cooriented contact elements of the plane.

A jet point (q, p, u) maps to the contact element at x = u*n + p*n_perp,
cooriented by the unit vector n = (cos q, sin q), with n_perp = (-sin q,
cos q) fixing the covector-to-vector identification.  The map is an exact
two-sided inverse pair with (q, p, u) = (theta, <x, n_perp>, <x, n>), and
it takes closed Legendrian loops to curves whose base velocity is
annihilated by the coorienting covector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import TWO_PI, JetPoint, LegendrianLoop, LegendrianReport, default_leg_tol, wrap_angle

__all__ = [
    "ContactElement",
    "ContactCurve",
    "hodograph_fwd",
    "hodograph_inv",
    "map_loop",
    "fiber_as_jet",
    "check_legendrian_st",
]


@dataclass(frozen=True)
class ContactElement:
    """A cooriented contact element of the plane: base point and normal angle."""

    x: tuple
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", (float(self.x[0]), float(self.x[1])))
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    @property
    def normal(self):
        return np.array([np.cos(self.theta), np.sin(self.theta)])


def hodograph_fwd(pt: JetPoint) -> ContactElement:
    """Contact element at u*n + p*n_perp, cooriented by n = (cos q, sin q)."""
    c, s = np.cos(pt.q), np.sin(pt.q)
    x1 = pt.u * c - pt.p * s
    x2 = pt.u * s + pt.p * c
    return ContactElement(x=(x1, x2), theta=pt.q)


def hodograph_inv(el: ContactElement) -> JetPoint:
    """Exact inverse: q = theta, u = <x, n>, p = <x, n_perp>."""
    c, s = np.cos(el.theta), np.sin(el.theta)
    x1, x2 = el.x
    return JetPoint(q=el.theta, p=-x1 * s + x2 * c, u=x1 * c + x2 * s)


@dataclass
class ContactCurve:
    """Closed sampled curve of contact elements."""

    xs: np.ndarray      # shape (n, 2)
    thetas: np.ndarray  # shape (n,)
    s: np.ndarray

    @property
    def n(self) -> int:
        return self.thetas.shape[0]

    def element(self, i: int) -> ContactElement:
        return ContactElement(x=tuple(self.xs[i]), theta=self.thetas[i])


def map_loop(loop: LegendrianLoop) -> ContactCurve:
    """Map every sample of a loop to its contact element."""
    c, s = np.cos(loop.q), np.sin(loop.q)
    xs = np.column_stack([loop.u * c - loop.p * s, loop.u * s + loop.p * c])
    return ContactCurve(xs=xs, thetas=loop.q.copy(), s=loop.s.copy())


def fiber_as_jet(x, n: int = 256) -> LegendrianLoop:
    """The jet-space loop whose image is the fiber of contact elements over x:
    samples (q, <x, n_perp>, <x, n>)."""
    x = np.asarray(x, dtype=float)
    qs = np.arange(n) * TWO_PI / n
    c, s = np.cos(qs), np.sin(qs)
    return LegendrianLoop(q=qs, p=-x[0] * s + x[1] * c, u=x[0] * c + x[1] * s)


def check_legendrian_st(curve: ContactCurve, tol: float | None = None) -> LegendrianReport:
    """Midpoint test that the coorienting covector annihilates the base
    velocity: |<n_mid, dx>| <= tol * (1 + |dtheta| + |dx|) per edge."""
    if curve.n < 16:
        raise ValueError("a contact curve needs at least 16 samples")
    if tol is None:
        tol = default_leg_tol(curve.n)
    n_vec = np.column_stack([np.cos(curve.thetas), np.sin(curve.thetas)])
    n_mid = 0.5 * (n_vec + np.roll(n_vec, -1, axis=0))
    dx = np.roll(curve.xs, -1, axis=0) - curve.xs
    dtheta = np.abs(np.mod(np.roll(curve.thetas, -1) - curve.thetas + np.pi, TWO_PI) - np.pi)
    defect = np.abs(np.sum(n_mid * dx, axis=1)) / (
        1.0 + dtheta + np.linalg.norm(dx, axis=1))
    max_defect = float(np.max(defect))
    return LegendrianReport(max_defect=max_defect, tol=tol, passed=max_defect <= tol)
