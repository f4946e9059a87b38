"""Geometry of the 1-jet space of the circle.

Points carry coordinates (q, p, u) with q an angle; the contact form is
du - p dq.  Loops are closed sampled curves, isotopies are time-stamped
frame sequences.  All angle arithmetic goes through a wrap to [0, 2*pi)
with increments taken in [-pi, pi) so winding is tracked without branch
cuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "JetPoint",
    "LegendrianLoop",
    "Isotopy",
    "LegendrianReport",
    "PositivityReport",
    "Front",
    "contact_form",
    "check_legendrian",
    "check_positive_isotopy",
    "front_projection",
    "check_embedded",
    "wrap_angle",
    "wrap_delta",
    "default_leg_tol",
]


def wrap_angle(q):
    """Reduce an angle (or array) to [0, 2*pi).  Idempotent."""
    return np.mod(q, TWO_PI)


def wrap_delta(d):
    """Reduce an angle increment (or array) to [-pi, pi)."""
    return np.mod(np.asarray(d) + np.pi, TWO_PI) - np.pi


@dataclass(frozen=True)
class JetPoint:
    """A point (q, p, u) of the jet space; q stored reduced mod 2*pi."""

    q: float
    p: float
    u: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(wrap_angle(self.q)))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "u", float(self.u))


class LegendrianLoop:
    """Closed discretized curve in (q, p, u), cyclically indexed.

    The constructor only enforces shape (>= 16 samples, equal lengths) and
    computes the base winding number; whether the samples actually satisfy
    the Legendrian closure condition is the job of ``check_legendrian``.
    """

    def __init__(self, q, p, u, s=None):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        n = q.shape[0]
        if n < 16:
            raise ValueError(f"a loop needs at least 16 samples, got {n}")
        if p.shape != (n,) or u.shape != (n,):
            raise ValueError("q, p, u must have equal length")
        self.q = wrap_angle(q)
        self.p = p
        self.u = u
        self.s = np.arange(n) * TWO_PI / n if s is None else np.asarray(s, dtype=float)
        dq = wrap_delta(np.roll(self.q, -1) - self.q)
        if np.any(np.abs(dq) > np.pi * 0.999):
            raise ValueError("consecutive samples jump by ~pi in q; loop not closed "
                             "or sampled far too coarsely")
        self.winding = int(round(float(np.sum(dq)) / TWO_PI))

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def edge_deltas(self):
        """Cyclic per-edge (dq, du, p_mid) with lift-consistent dq."""
        dq = wrap_delta(np.roll(self.q, -1) - self.q)
        du = np.roll(self.u, -1) - self.u
        p_mid = 0.5 * (self.p + np.roll(self.p, -1))
        return dq, du, p_mid

    def point(self, i: int) -> JetPoint:
        return JetPoint(self.q[i], self.p[i], self.u[i])

    def translated(self, dq=0.0, du=0.0) -> "LegendrianLoop":
        return LegendrianLoop(self.q + dq, self.p.copy(), self.u + du, s=self.s.copy())


@dataclass
class Isotopy:
    """Time-stamped sequence of loops with common sample count and winding."""

    frames: list
    times: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.frames) != self.times.shape[0]:
            raise ValueError("one time stamp per frame required")
        if len(self.frames) < 2:
            raise ValueError("an isotopy needs at least 2 frames")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("time stamps must be strictly increasing")
        n0 = self.frames[0].n
        w0 = self.frames[0].winding
        for fr in self.frames[1:]:
            if fr.n != n0:
                raise ValueError("mismatched frame shapes")
            if fr.winding != w0:
                raise ValueError("frames must share the base winding number")


def contact_form(point: JetPoint, tangent) -> float:
    """Evaluate du - p dq on a tangent vector (v_q, v_p, v_u) at ``point``."""
    v_q, _v_p, v_u = tangent
    return float(v_u - point.p * v_q)


def default_leg_tol(n: int) -> float:
    # scales like the square of the grid step; midpoint-rule defects of honest
    # Legendrians sit well below this, broken closure sits far above
    return (TWO_PI / n) ** 2


@dataclass
class LegendrianReport:
    max_defect: float
    tol: float
    passed: bool


def check_legendrian(loop: LegendrianLoop, tol_leg: float | None = None) -> LegendrianReport:
    """Midpoint-rule closure test |du - p_mid dq| <= tol*(1+|dq|+|du|) per edge."""
    if tol_leg is None:
        tol_leg = default_leg_tol(loop.n)
    dq, du, p_mid = loop.edge_deltas()
    defect = np.abs(du - p_mid * dq) / (1.0 + np.abs(dq) + np.abs(du))
    max_defect = float(np.max(defect))
    return LegendrianReport(max_defect=max_defect, tol=tol_leg, passed=max_defect <= tol_leg)


@dataclass
class PositivityReport:
    min_alpha: float
    passed: bool
    argmin: tuple = field(default=())


def check_positive_isotopy(iso: Isotopy) -> PositivityReport:
    """Estimate frame velocities by symmetric time differences and evaluate
    the contact form on them; positive means min over all samples > 0.

    Interior frames use the straddling difference (a convex combination of
    the one-sided slopes on non-uniform stamps), endpoints are one-sided.
    """
    Q = np.stack([fr.q for fr in iso.frames])
    P = np.stack([fr.p for fr in iso.frames])
    U = np.stack([fr.u for fr in iso.frames])
    T = iso.times
    m = Q.shape[0]

    vq = np.empty_like(Q)
    vu = np.empty_like(U)
    # one-sided at the ends
    vq[0] = wrap_delta(Q[1] - Q[0]) / (T[1] - T[0])
    vu[0] = (U[1] - U[0]) / (T[1] - T[0])
    vq[-1] = wrap_delta(Q[-1] - Q[-2]) / (T[-1] - T[-2])
    vu[-1] = (U[-1] - U[-2]) / (T[-1] - T[-2])
    if m > 2:
        span = (T[2:] - T[:-2])[:, None]
        vq[1:-1] = wrap_delta(Q[2:] - Q[:-2]) / span
        vu[1:-1] = (U[2:] - U[:-2]) / span

    alpha = vu - P * vq
    idx = np.unravel_index(int(np.argmin(alpha)), alpha.shape)
    min_alpha = float(alpha[idx])
    return PositivityReport(min_alpha=min_alpha, passed=min_alpha > 0.0,
                            argmin=(int(idx[0]), int(idx[1])))


@dataclass
class Front:
    """Front projection of a loop: (q, u) samples plus cusp marks.

    Cusps are the samples where the lift-consistent q-increment changes
    sign; ``cusp_indices`` refers to sample positions.
    """

    q: np.ndarray
    u: np.ndarray
    cusp_indices: np.ndarray


def front_projection(loop: LegendrianLoop) -> Front:
    dq = wrap_delta(np.roll(loop.q, -1) - loop.q)
    sign = np.sign(dq)
    # carry the previous nonzero sign across flat edges
    last = 0.0
    carried = np.empty_like(sign)
    for i, sgn in enumerate(sign):
        if sgn != 0.0:
            last = sgn
        carried[i] = last
    if last != 0.0:
        head = 0
        while head < len(sign) and sign[head] == 0.0:
            carried[head] = last
            head += 1
    cusps = np.nonzero(carried * np.roll(carried, 1) < 0)[0]
    return Front(q=loop.q.copy(), u=loop.u.copy(), cusp_indices=cusps)


def check_embedded(loop: LegendrianLoop, tol: float = 1e-8) -> bool:
    """True iff all non-adjacent sample pairs are >= tol apart in (q, p, u),
    with the q distance measured on the circle."""
    n = loop.n
    q, p, u = loop.q, loop.p, loop.u
    for i in range(n - 2):
        j0 = i + 2
        # the pair (0, n-1) is cyclically adjacent
        j1 = n - 1 if i == 0 else n
        if j0 >= j1:
            continue
        dq = wrap_delta(q[j0:j1] - q[i])
        dist2 = dq * dq + (p[j0:j1] - p[i]) ** 2 + (u[j0:j1] - u[i]) ** 2
        if np.min(dist2) < tol * tol:
            return False
    return True
