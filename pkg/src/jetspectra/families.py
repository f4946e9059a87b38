"""Generating families quadratic at infinity on the circle.

A family is F(q, w) = Q(w) + g(q, w) with Q a diagonal quadratic form with
entries +-1 on the fiber R^K and g given by a DSL expression with exact
derivatives.  The fiber-critical set {d_w F = 0} carries the induced
Legendrian curve (q, d_q F, F); its points with d_q F = 0 are the critical
points, whose values feed the spectral invariants.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from . import exprs
from .exprs import Expr, parse
from .jets import TWO_PI, LegendrianLoop, wrap_angle, wrap_delta

logger = logging.getLogger(__name__)

__all__ = [
    "GeneratingFamily",
    "FiberCriticalPoint",
    "CriticalPoint",
    "CriticalValue",
    "ContinuationError",
    "fiber_critical_set",
    "fiber_roots_at",
    "legendrian_from_family",
    "rank_condition_check",
    "critical_points",
    "critical_values",
    "group_critical_values",
]


class ContinuationError(RuntimeError):
    """A branch of the fiber-critical set could not be traced to closure."""

    def __init__(self, message, q=None):
        super().__init__(message)
        self.q = q


def _as_expr(g, fiber_dim, extra_vars):
    if isinstance(g, Expr):
        return g
    return parse(g, fiber_dim=fiber_dim)


class GeneratingFamily:
    """F = Q + g on S^1 x R^K, with derivative expressions cached.

    ``q_signs`` are the +-1 diagonal entries of Q; ``index`` counts the -1
    entries.  ``bound_radius`` is the fiber truncation radius; when not
    given it is estimated as 2*B + 1 from a grid estimate B of
    sup |d_w g| carrying a safety factor of 2, which keeps every
    fiber-critical point strictly inside the ball.
    """

    def __init__(self, fiber_dim, q_signs, g, bound_radius=None, extra_vars=()):
        self.fiber_dim = int(fiber_dim)
        if self.fiber_dim < 0:
            raise ValueError("fiber dimension must be >= 0")
        self.q_signs = tuple(int(s) for s in q_signs)
        if len(self.q_signs) != self.fiber_dim:
            raise ValueError("one sign per fiber coordinate required")
        if any(s not in (-1, 1) for s in self.q_signs):
            raise ValueError("quadratic form entries must be +1 or -1")
        self.g = _as_expr(g, self.fiber_dim, extra_vars)
        self.extra_vars = tuple(extra_vars)
        allowed = {"q"} | {f"w{i + 1}" for i in range(self.fiber_dim)} | set(self.extra_vars)
        extra = exprs.free_variables(self.g) - allowed
        if extra:
            raise ValueError(f"family expression uses unexpected variables {sorted(extra)}")
        self.index = sum(1 for s in self.q_signs if s < 0)
        self._wnames = [f"w{i + 1}" for i in range(self.fiber_dim)]
        self._dq = exprs.differentiate(self.g, "q")
        self._dw = [exprs.differentiate(self.g, n) for n in self._wnames]
        self._dww = [
            [exprs.differentiate(self._dw[i], self._wnames[j]) for j in range(self.fiber_dim)]
            for i in range(self.fiber_dim)
        ]
        self._dwq = [exprs.differentiate(d, "q") for d in self._dw]
        self._dqq = exprs.differentiate(self._dq, "q")
        self.bound_radius = (
            float(bound_radius) if bound_radius is not None else self._estimate_bound_radius()
        )

    # -- construction helpers ------------------------------------------------

    def _require_closed(self):
        if self.extra_vars:
            raise ValueError(
                f"family still depends on parameters {self.extra_vars}; slice them first"
            )

    def _estimate_bound_radius(self, n_q=96, n_w=9, max_rounds=4):
        if self.fiber_dim == 0:
            return 1.0
        radius = 1.0
        for _ in range(max_rounds):
            qs = np.arange(n_q) * TWO_PI / n_q
            axes = [qs] + [np.linspace(-radius, radius, n_w)] * self.fiber_dim
            grids = np.meshgrid(*axes, indexing="ij")
            env = {"q": grids[0]}
            env.update({n: grids[i + 1] for i, n in enumerate(self._wnames)})
            for name in self.extra_vars:
                env[name] = np.zeros_like(grids[0])
            sq = np.zeros_like(grids[0])
            for d in self._dw:
                sq = sq + np.asarray(exprs.evaluate(d, env)) ** 2
            b_hat = 2.0 * float(np.sqrt(np.max(sq)))  # safety factor 2
            new_radius = 2.0 * b_hat + 1.0
            if new_radius <= radius:
                return radius
            radius = new_radius
        logger.warning(
            "fiber derivative bound did not stabilize; keeping radius %.3g "
            "(expression may not have bounded fiber differential)", radius)
        return radius

    # -- evaluation ----------------------------------------------------------

    def _env(self, q, w):
        env = {"q": q}
        if self.fiber_dim:
            w = np.asarray(w, dtype=float)
            for i, name in enumerate(self._wnames):
                env[name] = w[..., i]
        return env

    def _quad(self, w):
        if self.fiber_dim == 0:
            return 0.0
        w = np.asarray(w, dtype=float)
        signs = np.asarray(self.q_signs, dtype=float)
        return np.sum(signs * w * w, axis=-1)

    def value(self, q, w=None):
        """F(q, w) = Q(w) + g(q, w)."""
        return exprs.evaluate(self.g, self._env(q, w)) + self._quad(w)

    def p_value(self, q, w=None):
        """d_q F, the momentum of the induced curve."""
        return exprs.evaluate(self._dq, self._env(q, w))

    def grad_w(self, q, w):
        """d_w F, shape (..., K)."""
        env = self._env(q, w)
        w = np.asarray(w, dtype=float)
        cols = [
            np.broadcast_to(np.asarray(exprs.evaluate(d, env), dtype=float), w[..., i].shape)
            + 2.0 * self.q_signs[i] * w[..., i]
            for i, d in enumerate(self._dw)
        ]
        return np.stack(cols, axis=-1)

    def hess_ww(self, q, w):
        """d_ww F, shape (..., K, K)."""
        env = self._env(q, w)
        shape = np.broadcast(np.asarray(q), np.asarray(w)[..., 0]).shape if self.fiber_dim else ()
        K = self.fiber_dim
        out = np.zeros(shape + (K, K))
        for i in range(K):
            for j in range(K):
                out[..., i, j] = exprs.evaluate(self._dww[i][j], env)
            out[..., i, i] += 2.0 * self.q_signs[i]
        return out

    def grad_wq(self, q, w):
        """d_wq F (mixed second derivatives), shape (..., K)."""
        env = self._env(q, w)
        base = np.broadcast(np.asarray(q), np.asarray(w)[..., 0]).shape if self.fiber_dim else ()
        return np.stack(
            [np.broadcast_to(np.asarray(exprs.evaluate(d, env), dtype=float), base)
             for d in self._dwq],
            axis=-1,
        )

    def qq_value(self, q, w=None):
        return exprs.evaluate(self._dqq, self._env(q, w))

    # -- derived families ------------------------------------------------------

    def stabilized(self, sign: int) -> "GeneratingFamily":
        """Append one fiber coordinate with quadratic term sign*w^2."""
        if sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        g_text = str(self.g)
        return GeneratingFamily(
            self.fiber_dim + 1,
            self.q_signs + (sign,),
            parse(g_text, fiber_dim=self.fiber_dim + 1),
            bound_radius=self.bound_radius,
            extra_vars=self.extra_vars,
        )

    def sliced(self, name: str, value: float) -> "GeneratingFamily":
        """Substitute a parameter variable (t or lambda) by a constant."""
        if name not in self.extra_vars:
            raise ValueError(f"'{name}' is not a parameter of this family")
        rest = tuple(v for v in self.extra_vars if v != name)
        return GeneratingFamily(
            self.fiber_dim,
            self.q_signs,
            exprs.substitute(self.g, name, value),
            bound_radius=self.bound_radius,
            extra_vars=rest,
        )

    def with_term(self, expr: Expr, coefficient_var: str) -> "GeneratingFamily":
        """F - coefficient_var * expr, keeping coefficient_var as a parameter."""
        g2 = exprs.Sub(self.g, exprs.Mul(exprs.Var(coefficient_var), expr))
        return GeneratingFamily(
            self.fiber_dim,
            self.q_signs,
            g2,
            bound_radius=self.bound_radius,
            extra_vars=tuple(set(self.extra_vars) | {coefficient_var}),
        )

    # -- serialization ---------------------------------------------------------

    def to_json(self, grid: int | None = None) -> str:
        doc = {"K": self.fiber_dim, "Qsigns": list(self.q_signs), "g": str(self.g)}
        if grid is not None:
            doc["grid"] = int(grid)
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "GeneratingFamily":
        doc = json.loads(text)
        return cls(doc["K"], doc.get("Qsigns", []), doc["g"])

    def __repr__(self):
        return (f"GeneratingFamily(K={self.fiber_dim}, Qsigns={list(self.q_signs)}, "
                f"g={str(self.g)!r}, bound_radius={self.bound_radius:.3g})")


@dataclass(frozen=True)
class FiberCriticalPoint:
    q: float
    w: tuple
    value: float
    p: float
    hessian_det: float


@dataclass(frozen=True)
class CriticalPoint:
    """Point with d_w F = 0 and d_q F = 0 (or a whole degenerate level)."""

    q: float
    w: tuple
    value: float
    hessian_det: float      # determinant of the full (K+1)x(K+1) Hessian
    fiber_hessian_det: float
    degenerate: bool


@dataclass(frozen=True)
class CriticalValue:
    value: float
    multiplicity: int
    degenerate: bool


# ---------------------------------------------------------------------------
# fiber-critical set


def _solve_newton_steps(hess, grad):
    """Batched solve hess @ delta = grad for K = 1, 2 by closed form, else lapack."""
    K = grad.shape[-1]
    if K == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            return grad / hess[..., 0, 0][..., None]
    if K == 2:
        a = hess[..., 0, 0]
        b = hess[..., 0, 1]
        c = hess[..., 1, 0]
        d = hess[..., 1, 1]
        det = a * d - b * c
        with np.errstate(divide="ignore", invalid="ignore"):
            dx = (d * grad[..., 0] - b * grad[..., 1]) / det
            dy = (-c * grad[..., 0] + a * grad[..., 1]) / det
        return np.stack([dx, dy], axis=-1)
    return np.linalg.solve(hess, grad[..., None])[..., 0]


def _fiber_roots_grid(family, qs, tol_newton, seeds_per_axis, max_iter):
    """Vectorized fiber Newton over all (grid q, lattice seed) pairs.

    Returns a list of FiberCriticalPoint sorted by (q, value); seeds that
    diverge or escape the truncation ball are dropped (counted in a debug
    log), duplicates within 10*tol_newton merge.
    """
    K = family.fiber_dim
    n_q = qs.shape[0]
    R = family.bound_radius
    axis = np.linspace(-R, R, seeds_per_axis)
    lattice = np.stack(np.meshgrid(*([axis] * K), indexing="ij"), axis=-1).reshape(-1, K)
    n_seeds = lattice.shape[0]

    q_all = np.repeat(qs, n_seeds)
    w = np.tile(lattice, (n_q, 1)).astype(float)

    for _ in range(max_iter):
        grad = family.grad_w(q_all, w)
        if np.max(np.abs(grad)) < tol_newton:
            break
        hess = family.hess_ww(q_all, w)
        step = _solve_newton_steps(hess, grad)
        step = np.where(np.isfinite(step), step, 0.0)
        norm = np.linalg.norm(step, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            damp = np.where(norm > R, R / norm, 1.0)  # damp wild steps
        w = w - step * damp

    grad = family.grad_w(q_all, w)
    res = np.linalg.norm(grad, axis=-1)
    inside = np.linalg.norm(w, axis=-1) <= R * (1 + 1e-9)
    good = np.isfinite(res) & (res <= tol_newton) & inside
    n_failed = int(np.sum(~good))
    if n_failed:
        logger.debug("fiber Newton: %d of %d seeds unconverged or escaped", n_failed,
                     q_all.shape[0])

    points = []
    dedup = 10.0 * tol_newton
    hess_all = family.hess_ww(q_all, w)
    det_all = np.linalg.det(hess_all)
    val_all = np.broadcast_to(np.asarray(family.value(q_all, w), dtype=float), q_all.shape)
    p_all = np.broadcast_to(np.asarray(family.p_value(q_all, w), dtype=float), q_all.shape)
    for iq in range(n_q):
        block = slice(iq * n_seeds, (iq + 1) * n_seeds)
        sel = np.nonzero(good[block])[0]
        if sel.size == 0:
            continue
        roots = w[block][sel]
        order = np.lexsort(tuple(roots[:, k] for k in reversed(range(K))))
        kept: list[int] = []
        for idx in order:
            if any(np.max(np.abs(roots[idx] - roots[j])) <= dedup for j in kept):
                continue
            kept.append(idx)
        for idx in kept:
            flat = iq * n_seeds + sel[idx]
            points.append(FiberCriticalPoint(
                q=float(qs[iq]),
                w=tuple(float(x) for x in w[flat]),
                value=float(val_all[flat]),
                p=float(p_all[flat]),
                hessian_det=float(det_all[flat]),
            ))
    points.sort(key=lambda pt: (pt.q, pt.value))
    return points


def fiber_critical_set(family: GeneratingFamily, n_q: int = 256,
                       tol_newton: float = 1e-10, seeds_per_axis: int = 5,
                       max_iter: int = 60):
    """Newton-refined solutions of d_w F(q, .) = 0 over a base grid.

    For K = 0 every grid point belongs to the set.  For K >= 1 Newton runs
    from a lattice of seeds_per_axis**K points inside the truncation ball at
    every grid q; converged roots are deduplicated with radius
    10*tol_newton.  Non-converged seeds are counted, not fatal.  Output is
    sorted by q, then by critical value.
    """
    if n_q < 64:
        raise ValueError("n_q must be >= 64")
    family._require_closed()
    qs = np.arange(n_q) * TWO_PI / n_q
    if family.fiber_dim == 0:
        vals = np.broadcast_to(np.asarray(family.value(qs), dtype=float), qs.shape)
        ps = np.broadcast_to(np.asarray(family.p_value(qs), dtype=float), qs.shape)
        return [
            FiberCriticalPoint(q=float(q), w=(), value=float(v), p=float(p), hessian_det=1.0)
            for q, v, p in zip(qs, vals, ps)
        ]
    return _fiber_roots_grid(family, qs, tol_newton, seeds_per_axis, max_iter)


def fiber_roots_at(family: GeneratingFamily, q0: float, tol_newton: float = 1e-10,
                   seeds_per_axis: int = 5, max_iter: int = 60):
    """Fiber-critical roots over a single base point: (w, fiber hessian det)."""
    family._require_closed()
    if family.fiber_dim == 0:
        return [((), 1.0)]
    pts = _fiber_roots_grid(family, np.array([float(q0)]), tol_newton,
                            seeds_per_axis, max_iter)
    return [(pt.w, pt.hessian_det) for pt in pts]


# ---------------------------------------------------------------------------
# induced Legendrian curves


def rank_condition_check(family: GeneratingFamily, pt: FiberCriticalPoint,
                         tol_rank: float = 1e-8) -> bool:
    """True iff the K x (K+1) matrix (F_wq, F_ww) has full rank K at ``pt``."""
    K = family.fiber_dim
    if K == 0:
        return True
    mat = _tangency_matrix(family, pt.q, np.asarray(pt.w, dtype=float))
    sv = np.linalg.svd(mat, compute_uv=False)
    return bool(sv[-1] > tol_rank * max(1.0, sv[0]))


def _tangency_matrix(family, q, w):
    """(F_wq | F_ww), rows indexed by fiber equations, columns by (q, w)."""
    col_q = family.grad_wq(q, w).reshape(family.fiber_dim, 1)
    ww = family.hess_ww(q, w).reshape(family.fiber_dim, family.fiber_dim)
    return np.concatenate([col_q, ww], axis=1)


def _trace_component(family, start, step, tol_newton, max_steps):
    """Pseudo-arclength trace of the curve d_w F = 0 through ``start``.

    State x = (q_lift, w).  The tangent is the null direction of the
    tangency matrix (which the rank condition keeps one-dimensional); a
    Newton corrector re-solves d_w F = 0 orthogonally to the tangent.
    Returns the closed polygon (list of states) without the repeated
    endpoint.
    """
    K = family.fiber_dim
    x0 = np.asarray(start, dtype=float)
    x = x0.copy()
    prev_tan = None
    samples = [x.copy()]
    h = step

    def tangent_at(x):
        mat = _tangency_matrix(family, x[0], x[1:])
        _, _, vt = np.linalg.svd(mat)
        return vt[-1]

    def correct(x, tan):
        for _ in range(12):
            g = family.grad_w(x[0], x[1:]).reshape(K)
            if np.max(np.abs(g)) < tol_newton:
                return x
            A = np.vstack([_tangency_matrix(family, x[0], x[1:]), tan])
            rhs = np.concatenate([-g, [0.0]])
            try:
                delta = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                return None
            x = x + delta
        return None

    for step_count in range(max_steps):
        tan = tangent_at(x)
        if prev_tan is not None and float(np.dot(tan, prev_tan)) < 0:
            tan = -tan
        elif prev_tan is None and tan[0] < 0:
            tan = -tan
        h_try = h
        nxt = None
        while h_try > step / 64:
            cand = correct(x + h_try * tan, tan)
            if cand is not None and np.linalg.norm(cand - x) < 4 * h_try:
                nxt = cand
                break
            h_try *= 0.5
        if nxt is None:
            raise ContinuationError(
                f"fiber-critical branch stalled near q = {wrap_angle(x[0]):.6f}",
                q=float(wrap_angle(x[0])))
        prev_tan = tan
        x = nxt
        if step_count >= 8:
            dq = wrap_delta(x[0] - x0[0])
            if abs(dq) < h and np.linalg.norm(x[1:] - x0[1:]) < h:
                return samples
        samples.append(x.copy())
        if abs(x[0] - x0[0]) > 40 * TWO_PI:
            raise ContinuationError(
                "fiber-critical branch does not close", q=float(wrap_angle(x[0])))
    raise ContinuationError("fiber-critical branch exceeded the step budget",
                            q=float(wrap_angle(x[0])))


def legendrian_from_family(family: GeneratingFamily, n_q: int = 256,
                           tol_newton: float = 1e-10):
    """Connected components of the fiber-critical set mapped to loops
    (q, d_q F, F).  Always returns a list of loops."""
    family._require_closed()
    K = family.fiber_dim
    if K == 0:
        qs = np.arange(n_q) * TWO_PI / n_q
        p = np.broadcast_to(np.asarray(family.p_value(qs), dtype=float), qs.shape)
        u = np.broadcast_to(np.asarray(family.value(qs), dtype=float), qs.shape)
        return [LegendrianLoop(q=qs, p=p.copy(), u=u.copy())]

    seeds = fiber_critical_set(family, n_q=max(64, n_q // 2), tol_newton=tol_newton)
    step = TWO_PI / n_q
    loops = []
    claimed: list[np.ndarray] = []

    def already_claimed(pt):
        x = np.array([pt.q, *pt.w])
        for path in claimed:
            dq = np.abs(wrap_delta(path[:, 0] - x[0]))
            dw = np.linalg.norm(path[:, 1:] - x[1:], axis=1)
            if np.min(dq + dw) < 3 * step:
                return True
        return False

    for pt in seeds:
        if already_claimed(pt):
            continue
        path = _trace_component(family, [pt.q, *pt.w],
                                step=step, tol_newton=tol_newton,
                                max_steps=80 * n_q)
        arr = np.asarray(path)
        if arr.shape[0] < 16:
            continue  # tiny isola below sampling resolution
        claimed.append(np.column_stack([wrap_angle(arr[:, 0]), arr[:, 1:]]))
        q = arr[:, 0]
        w = arr[:, 1:]
        p = np.array([float(family.p_value(qi, wi)) for qi, wi in zip(q, w)])
        u = np.array([float(family.value(qi, wi)) for qi, wi in zip(q, w)])
        loops.append(LegendrianLoop(q=wrap_angle(q), p=p, u=u))
    return loops


# ---------------------------------------------------------------------------
# critical points and values


def _full_hessian(family, q, w):
    K = family.fiber_dim
    H = np.zeros((K + 1, K + 1))
    H[0, 0] = float(family.qq_value(q, w))
    if K:
        wq = family.grad_wq(q, w).reshape(K)
        H[0, 1:] = wq
        H[1:, 0] = wq
        H[1:, 1:] = family.hess_ww(q, w).reshape(K, K)
    return H


def critical_points(family: GeneratingFamily, n_q: int = 256,
                    tol_newton: float = 1e-10, tol_flat: float = 1e-9):
    """Zeros of (d_q F, d_w F), Newton-refined in all variables.

    A family whose momentum vanishes identically along the fiber-critical
    set (a constant-in-q level) is reported as degenerate entries carrying
    the level values instead of isolated points.
    """
    family._require_closed()
    K = family.fiber_dim
    fcs = fiber_critical_set(family, n_q=n_q, tol_newton=tol_newton)
    if not fcs:
        return []
    scale = 1.0 + max(abs(pt.value) for pt in fcs)
    max_p = max(abs(pt.p) for pt in fcs)
    if max_p < tol_flat * scale:
        # whole circles of critical points at each fiber level
        levels: list[tuple[float, float]] = []
        out = []
        for pt in fcs:
            if any(abs(pt.value - lv) < 1e-7 * scale for lv, _ in levels):
                continue
            levels.append((pt.value, pt.hessian_det))
            out.append(CriticalPoint(q=float("nan"), w=pt.w, value=pt.value,
                                     hessian_det=0.0,
                                     fiber_hessian_det=pt.hessian_det,
                                     degenerate=True))
        out.sort(key=lambda c: c.value)
        return out

    found = []
    for pt in fcs:
        x = np.array([pt.q, *pt.w], dtype=float)
        ok = False
        for _ in range(60):
            G = np.concatenate([
                [float(family.p_value(x[0], x[1:]))],
                family.grad_w(x[0], x[1:]).reshape(K) if K else np.zeros(0),
            ])
            if np.max(np.abs(G)) < tol_newton:
                ok = True
                break
            H = _full_hessian(family, x[0], x[1:])
            try:
                delta = np.linalg.solve(H, G)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(delta)) or np.linalg.norm(delta) > 1.0:
                break
            x = x - delta
        if not ok:
            continue
        if K and np.linalg.norm(x[1:]) > family.bound_radius * (1 + 1e-6):
            continue
        q = float(wrap_angle(x[0]))
        w = tuple(float(v) for v in x[1:])
        H = _full_hessian(family, q, np.asarray(w))
        det = float(np.linalg.det(H))
        fib_det = float(np.linalg.det(family.hess_ww(q, np.asarray(w)).reshape(K, K))) if K else 1.0
        hess_scale = max(1.0, float(np.max(np.abs(H)))) ** (K + 1)
        found.append(CriticalPoint(
            q=q, w=w, value=float(family.value(q, np.asarray(w))),
            hessian_det=det, fiber_hessian_det=fib_det,
            degenerate=abs(det) < 1e-8 * hess_scale,
        ))

    # deduplicate on the cylinder
    found.sort(key=lambda c: (c.value, c.q))
    unique: list[CriticalPoint] = []
    for c in found:
        dup = False
        for u in unique:
            dq = abs(float(wrap_delta(c.q - u.q)))
            dw = max((abs(a - b) for a, b in zip(c.w, u.w)), default=0.0)
            if dq < 1e-6 and dw < 1e-6 and abs(c.value - u.value) < 1e-6 * scale:
                dup = True
                break
        if not dup:
            unique.append(c)
    return unique


def group_critical_values(points, tol: float | None = None):
    """Cluster critical points into values with multiplicity and flags."""
    if not points:
        return []
    scale = 1.0 + max(abs(pt.value) for pt in points)
    if tol is None:
        tol = 1e-6 * scale
    pts = sorted(points, key=lambda c: c.value)
    groups: list[CriticalValue] = []
    cur = [pts[0]]
    for pt in pts[1:]:
        if pt.value - cur[-1].value <= tol:
            cur.append(pt)
        else:
            groups.append(CriticalValue(
                value=float(np.mean([c.value for c in cur])),
                multiplicity=len(cur),
                degenerate=any(c.degenerate for c in cur)))
            cur = [pt]
    groups.append(CriticalValue(
        value=float(np.mean([c.value for c in cur])),
        multiplicity=len(cur),
        degenerate=any(c.degenerate for c in cur)))
    return groups


def critical_values(family: GeneratingFamily, n_q: int = 256, **kw):
    """Sorted critical values with multiplicity and degeneracy flags."""
    return group_critical_values(critical_points(family, n_q=n_q, **kw))
