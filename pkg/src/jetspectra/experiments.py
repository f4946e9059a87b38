"""Executable constructions: flows, closed positive loops, pencil intersections.

The contact flow (q, p, u) -> (q - t, p, u - t*eps) and vertical translation
are exact on samples.  A loop embedded in {p > 2*eps} travels around the
base under the flow and returns to itself after a vertical raise, forming a
closed positive path of embedded loops.  The pencil of a function f is the
surface swept by the jets of lambda*f over all lambda; intersections of a
loop with it are zeros of a scalar residual along the loop, and the scan of
boundary-relative min-max values of F - lambda*f locates one positive
lambda per homology generator of {f >= 0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exprs
from .cerf import FamilyPath, check_positive_family
from .exprs import Expr, parse
from .families import GeneratingFamily, legendrian_from_family
from .jets import TWO_PI, Isotopy, LegendrianLoop, wrap_angle, wrap_delta
from .spectra import betti_of_region, viterbo_numbers_with_boundary
from .util import map_ordered

__all__ = [
    "PositivityError",
    "contact_flow",
    "translate_vertical",
    "build_high_p_loop",
    "build_positive_loop",
    "PencilPoint",
    "PencilIntersections",
    "pencil_intersections",
    "LambdaCrossing",
    "LambdaScan",
    "lambda_scan",
    "LineExperiment",
    "fiber_line_experiment",
]


class PositivityError(ValueError):
    """A positivity precondition failed."""


# ---------------------------------------------------------------------------
# exact contactomorphisms on samples


def contact_flow(loop: LegendrianLoop, t: float, eps: float) -> LegendrianLoop:
    """Apply (q, p, u) -> (q - t, p, u - t*eps) to every sample."""
    return LegendrianLoop(q=loop.q - t, p=loop.p.copy(), u=loop.u - t * eps,
                          s=loop.s.copy())


def translate_vertical(loop: LegendrianLoop, c: float) -> LegendrianLoop:
    """Add c to the u coordinate of every sample."""
    return LegendrianLoop(q=loop.q.copy(), p=loop.p.copy(), u=loop.u + c,
                          s=loop.s.copy())


def build_high_p_loop(eps: float, margin: float, n: int = 1024) -> LegendrianLoop:
    """An embedded Legendrian loop with min p = 2*eps + margin and winding 1.

    The parametrization q(s) = s + 2 sin s reverses direction twice (two
    front cusps); p(s) = A(1 - cos s) + c cos 2s with c = 2*eps + margin and
    A = 5c stays >= c and is weighted so that the period of u(s) = integral
    of p dq vanishes identically, so the closed form

        u(s) = (A + c) sin s + (c - A)/2 sin 2s + (c/3) sin 3s

    satisfies u' = p q' exactly.
    """
    if eps <= 0 or margin <= 0:
        raise ValueError("eps and margin must be positive")
    c = 2.0 * eps + margin
    A = 5.0 * c
    s = np.arange(n) * TWO_PI / n
    q = s + 2.0 * np.sin(s)
    p = A - A * np.cos(s) + c * np.cos(2 * s)
    u = (A + c) * np.sin(s) + 0.5 * (c - A) * np.sin(2 * s) + (c / 3.0) * np.sin(3 * s)
    loop = LegendrianLoop(q=q, p=p, u=u, s=s)
    # the rectangle rule is exact for trigonometric polynomials of degree < n
    period_defect = abs(float(np.mean(p * (1.0 + 2.0 * np.cos(s)))) * TWO_PI)
    if float(p.min()) < 2.0 * eps + margin - 1e-12 or period_defect > 1e-9:
        raise RuntimeError(
            "momentum weighting failed to close the loop at the requested margin")
    return loop


def build_positive_loop(eps: float, n_samples: int = 1024, n_flow: int = 64,
                        n_raise: int = 16) -> Isotopy:
    """Closed positive path: one full turn of the contact flow applied to a
    high-momentum loop, followed by the vertical raise back to the start.

    Every frame is an exact contactomorphic image of the same loop, so the
    frames stay Legendrian and embedded; first and last frames agree to
    rounding error.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    base = build_high_p_loop(eps, eps, n=n_samples)
    frames = [contact_flow(base, t, eps) for t in np.arange(n_flow + 1) * TWO_PI / n_flow]
    times = list(np.arange(n_flow + 1) * TWO_PI / n_flow)
    drop = TWO_PI * eps
    lowest = frames[-1]
    raise_duration = 1.0
    for k in range(1, n_raise + 1):
        tau = k / n_raise
        frames.append(translate_vertical(lowest, drop * tau))
        times.append(TWO_PI + tau * raise_duration)
    return Isotopy(frames, np.asarray(times))


# ---------------------------------------------------------------------------
# pencil intersections


@dataclass(frozen=True)
class PencilPoint:
    s: float
    q: float
    lam: float
    residual: float


@dataclass
class PencilIntersections:
    count: int
    points: list
    degenerate: bool
    tangencies: list


def _pencil_residual(q, p, u, k):
    return p * np.cos(k * q) + u * k * np.sin(k * q)


def _pencil_lambda(q, p, u, k):
    # projection of (p, u) on the pencil direction (-k sin kq, cos kq)
    vs, vc = -k * np.sin(k * q), np.cos(k * q)
    return (p * vs + u * vc) / (vs * vs + vc * vc)


def pencil_intersections(loop: LegendrianLoop, k: int,
                         refine_steps: int = 80) -> PencilIntersections:
    """Intersections of a loop with the pencil {(q, -lam*k sin kq, lam cos kq)}.

    Zeros of g(s) = p cos(kq) + u k sin(kq) along the loop are located by
    sign changes and bisected on the piecewise-linear interpolant; lambda is
    recovered from (p, u) and a two-equation residual certifies each point.
    A loop with g identically zero lies inside the pencil (degenerate); a
    dip of |g| to ~0 without a sign change is flagged as a tangency.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = loop.n
    q_lift = loop.q[0] + np.concatenate([[0.0], np.cumsum(wrap_delta(np.diff(loop.q)))])
    g = _pencil_residual(q_lift, loop.p, loop.u, k)
    scale = 1.0 + float(np.max(np.abs(loop.p))) + k * float(np.max(np.abs(loop.u)))
    if np.max(np.abs(g)) < 1e-12 * scale:
        return PencilIntersections(count=0, points=[], degenerate=True, tangencies=[])

    zero_tol = 1e-13 * scale
    roots = []  # (s, q, p, u)

    def interp(i, frac):
        j = (i + 1) % n
        ds = (loop.s[j] - loop.s[i]) % TWO_PI
        dqi = float(wrap_delta(loop.q[j] - loop.q[i]))
        return (loop.s[i] + frac * ds,
                q_lift[i] + frac * dqi,
                loop.p[i] + frac * (loop.p[j] - loop.p[i]),
                loop.u[i] + frac * (loop.u[j] - loop.u[i]))

    exact = np.abs(g) <= zero_tol
    for i in range(n):
        if exact[i]:
            if not exact[i - 1]:  # leading edge of an exact-zero run
                roots.append((float(loop.s[i]), float(q_lift[i]),
                              float(loop.p[i]), float(loop.u[i])))
            continue
        j = (i + 1) % n
        if exact[j] or g[i] * g[j] >= 0:
            continue
        lo, hi = 0.0, 1.0
        for _ in range(refine_steps):
            mid = 0.5 * (lo + hi)
            _, qm, pm, um = interp(i, mid)
            gm = _pencil_residual(qm, pm, um, k)
            if gm == 0.0:
                lo = hi = mid
                break
            if (gm > 0) == (g[i] > 0):
                lo = mid
            else:
                hi = mid
        roots.append(interp(i, 0.5 * (lo + hi)))

    points = []
    for s_val, q_val, p_val, u_val in roots:
        lam = float(_pencil_lambda(q_val, p_val, u_val, k))
        res = float(np.hypot(p_val + lam * k * np.sin(k * q_val),
                             u_val - lam * np.cos(k * q_val)))
        points.append(PencilPoint(s=float(s_val % TWO_PI), q=float(wrap_angle(q_val)),
                                  lam=lam, residual=res))
    points.sort(key=lambda pt: pt.s)

    # local |g| dips to near zero without a sign change
    tangencies = []
    tang_tol = 1e-9 * scale
    for i in range(n):
        if exact[i]:
            continue
        prev_g, next_g = g[i - 1], g[(i + 1) % n]
        if abs(g[i]) < tang_tol and g[i] * prev_g > 0 and g[i] * next_g > 0:
            if abs(g[i]) <= abs(prev_g) and abs(g[i]) <= abs(next_g):
                tangencies.append(float(loop.s[i]))

    return PencilIntersections(count=len(points), points=points,
                               degenerate=False, tangencies=tangencies)


# ---------------------------------------------------------------------------
# scan of boundary-relative min-max values of F - lambda f


@dataclass(frozen=True)
class LambdaCrossing:
    k: int
    lam: float
    q: float
    w: tuple
    residual_value: float
    residual_grad: float
    interior: bool


@dataclass
class LambdaScan:
    lambdas: np.ndarray
    curves: np.ndarray  # shape (n_lambda, b)
    crossings: list
    distinct_lambdas: list
    final_values: np.ndarray
    b: int


def _polish_crossing(family: GeneratingFamily, f: Expr, q0: float, w0, lam0: float,
                     iters: int = 60):
    """Newton on {H = 0, dH = 0} for H = F - lambda f, unknowns (q, w, lambda)."""
    K = family.fiber_dim
    df = exprs.differentiate(f, "q")
    ddf = exprs.differentiate(df, "q")
    x = np.concatenate([[q0], np.asarray(w0, dtype=float), [lam0]])
    for _ in range(iters):
        q, w, lam = x[0], x[1:1 + K], x[-1]
        fv = float(exprs.evaluate(f, {"q": q}))
        dfv = float(exprs.evaluate(df, {"q": q}))
        ddfv = float(exprs.evaluate(ddf, {"q": q}))
        Fv = float(family.value(q, w)) if K else float(family.value(q))
        Fq = float(family.p_value(q, w)) if K else float(family.p_value(q))
        Fqq = float(family.qq_value(q, w)) if K else float(family.qq_value(q))
        resid = np.zeros(K + 2)
        resid[0] = Fv - lam * fv
        resid[1] = Fq - lam * dfv
        J = np.zeros((K + 2, K + 2))
        J[0, 0] = Fq - lam * dfv
        J[0, -1] = -fv
        J[1, 0] = Fqq - lam * ddfv
        J[1, -1] = -dfv
        if K:
            gw = family.grad_w(q, w).reshape(K)
            wq = family.grad_wq(q, w).reshape(K)
            ww = family.hess_ww(q, w).reshape(K, K)
            resid[2:] = gw
            J[0, 1:1 + K] = gw
            J[1, 1:1 + K] = wq
            J[2:, 0] = wq
            J[2:, 1:1 + K] = ww
        if np.max(np.abs(resid)) < 1e-13:
            break
        try:
            x = x - np.linalg.solve(J, resid)
        except np.linalg.LinAlgError:
            break
    q, w, lam = float(wrap_angle(x[0])), tuple(float(v) for v in x[1:1 + K]), float(x[-1])
    fv = float(exprs.evaluate(f, {"q": x[0]}))
    Fv = float(family.value(x[0], x[1:1 + K])) if K else float(family.value(x[0]))
    Fq = float(family.p_value(x[0], x[1:1 + K])) if K else float(family.p_value(x[0]))
    dfv = float(exprs.evaluate(df, {"q": x[0]}))
    res_val = abs(Fv - lam * fv)
    res_grad = abs(Fq - lam * dfv)
    if K:
        res_grad = max(res_grad, float(np.max(np.abs(family.grad_w(x[0], x[1:1 + K])))))
    return q, w, lam, res_val, res_grad, fv


def lambda_scan(family: GeneratingFamily, f, lambda_max: float, n_lambda: int = 512,
                n_q: int = 256, n_w: int = 65, threads: int = 1) -> LambdaScan:
    """Scan c_{k,M}(F - lambda f) over a lambda grid and certify the zero
    crossings against the direct two-equation intersection system.

    Preconditions: 0 is a regular value of f, all values at lambda = 0 are
    positive; all values at lambda_max must come out negative.
    """
    f_expr = f if isinstance(f, Expr) else parse(f, fiber_dim=0)
    pencil = family.with_term(f_expr, "lambda")
    b = betti_of_region(f_expr, n_q=n_q)
    lambdas = np.linspace(0.0, float(lambda_max), int(n_lambda))

    def values_at(lam):
        sliced = pencil.sliced("lambda", float(lam))
        return viterbo_numbers_with_boundary(sliced, f_expr, n_q=n_q, n_w=n_w)

    spectra = map_ordered(lambda lam: values_at(lam), lambdas, threads=threads)
    curves = np.asarray([sp.values for sp in spectra], dtype=float)
    if np.any(curves[0] <= 0.0):
        raise PositivityError(
            "the scan needs strictly positive min-max values at lambda = 0; "
            f"got {curves[0].tolist()}")
    if np.any(curves[-1] >= 0.0):
        raise ValueError(
            f"lambda_max = {lambda_max} too small: final values {curves[-1].tolist()} "
            "are not all negative")

    crossings = []
    for k in range(b):
        col = curves[:, k]
        idx = int(np.nonzero(col <= 0.0)[0][0])
        lo, hi = float(lambdas[idx - 1]), float(lambdas[idx])
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if values_at(mid).values[k] > 0.0:
                lo = mid
            else:
                hi = mid
        lam_star = 0.5 * (lo + hi)
        sp = values_at(lam_star)
        q0, w0, _ = sp.witnesses[k]
        q, w, lam, res_val, res_grad, fv = _polish_crossing(
            family, f_expr, q0, w0, lam_star)
        crossings.append(LambdaCrossing(
            k=k + 1, lam=lam, q=q, w=w, residual_value=res_val,
            residual_grad=res_grad, interior=fv > 0.0))

    distinct: list[float] = []
    tol = max(1e-9, 1e-6 * float(lambda_max))
    for c in sorted(cr.lam for cr in crossings):
        if not distinct or abs(c - distinct[-1]) > tol:
            distinct.append(c)

    return LambdaScan(lambdas=lambdas, curves=curves, crossings=crossings,
                      distinct_lambdas=distinct, final_values=curves[-1], b=b)


# ---------------------------------------------------------------------------
# two-sided pencil experiment from a translated fiber


@dataclass
class LineExperiment:
    points: list  # (side, LambdaCrossing)
    count: int
    passed: bool
    min_speed: float


def fiber_line_experiment(x_fiber, direction, deformation: FamilyPath,
                          n_q: int = 256, n_w: int = 65, lambda_max: float | None = None,
                          n_lambda: int = 512, start_tol: float = 1e-8) -> LineExperiment:
    """Deform the linear-height family of a plane point positively, then count
    intersections of the end loop with the two half-pencils of the height
    function of a line direction.

    The direction spans a line through the origin; the two scans (for f and
    -f) contribute at least one positive lambda each, and their pencils are
    disjoint, so the count is at least 2.
    """
    x = np.asarray(x_fiber, dtype=float)
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise ValueError("direction must be a nonzero vector")
    d = d / norm

    speed = check_positive_family(deformation, n_q=n_q)
    if not speed.passed:
        raise PositivityError(
            f"deformation is not positive-certified (min speed {speed.min_speed:.3g})")

    start = deformation.slice_at(deformation.t0)
    loop0 = legendrian_from_family(start, n_q=max(64, n_q // 2))[0]
    expected_u = x[0] * np.cos(loop0.q) + x[1] * np.sin(loop0.q)
    expected_p = -x[0] * np.sin(loop0.q) + x[1] * np.cos(loop0.q)
    if (np.max(np.abs(loop0.u - expected_u)) > start_tol
            or np.max(np.abs(loop0.p - expected_p)) > start_tol):
        raise ValueError("deformation does not start at the linear-height family "
                         "of the requested base point")

    end = deformation.slice_at(deformation.t1)
    if lambda_max is None:
        qs = np.arange(n_q) * TWO_PI / n_q
        u_end = np.broadcast_to(np.asarray(end.value(qs) if end.fiber_dim == 0
                                           else end.value(qs, np.zeros((n_q, end.fiber_dim))),
                                           dtype=float), qs.shape)
        lambda_max = 4.0 * (1.0 + float(np.max(np.abs(u_end))))

    f_text = f"{float(d[0])!r}*cos(q) + {float(d[1])!r}*sin(q)"
    points = []
    for side, text in ((+1, f_text), (-1, f"-({f_text})")):
        scan = lambda_scan(end, text, lambda_max=lambda_max, n_lambda=n_lambda,
                           n_q=n_q, n_w=n_w)
        for cr in scan.crossings:
            points.append((side, cr))

    sides = {side for side, _ in points}
    passed = len(points) >= 2 and sides == {+1, -1}
    return LineExperiment(points=points, count=len(points), passed=passed,
                          min_speed=speed.min_speed)
