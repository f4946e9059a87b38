"""One-parameter families of generating families.

Critical values swept over the parameter form a diagram of branches (t, z);
for paths whose fiber-critical points all move upward (positive vertical
speed) the branches have positive slope away from the singular events and
the min-max values increase monotonically.  Events detected: branch
crossings, birth/death pairs (cusps), and interior critical points hitting
the region boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exprs
from .families import (
    GeneratingFamily,
    critical_points,
    fiber_critical_set,
)
from .jets import wrap_delta
from .spectra import (
    generalized_critical_values,
    viterbo_numbers,
    viterbo_numbers_with_boundary,
)
from .util import map_ordered

__all__ = [
    "FamilyPath",
    "CerfBranch",
    "CerfEvent",
    "CerfDiagram",
    "SpeedReport",
    "Trajectory",
    "SlopeReport",
    "cerf_diagram",
    "vertical_speed",
    "check_positive_family",
    "viterbo_trajectory",
    "slope_check",
]


class FamilyPath:
    """A generating family whose expression may contain t, over [t0, t1].

    Every slice shares the fiber dimension, the quadratic form, and one
    common truncation radius (the max of the slice estimates over a probe
    of parameter values), so filtrations at different t are comparable.
    """

    def __init__(self, family: GeneratingFamily, t0: float, t1: float, n_t: int,
                 bound_radius: float | None = None):
        if n_t < 2:
            raise ValueError("a path needs at least 2 samples")
        if t1 <= t0:
            raise ValueError("t range must be increasing")
        self.family = family
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.n_t = int(n_t)
        self._has_t = "t" in family.extra_vars
        self._dt_expr = exprs.differentiate(family.g, "t") if self._has_t else None
        if bound_radius is not None:
            self.bound_radius = float(bound_radius)
        elif family.fiber_dim == 0:
            self.bound_radius = 1.0
        else:
            rest = tuple(v for v in family.extra_vars if v != "t")
            radius = 0.0
            for t in np.linspace(self.t0, self.t1, 5):
                g_t = exprs.substitute(family.g, "t", float(t)) if self._has_t else family.g
                probe = GeneratingFamily(family.fiber_dim, family.q_signs, g_t,
                                         extra_vars=rest)
                radius = max(radius, probe.bound_radius)
            self.bound_radius = radius

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_t)

    def slice_at(self, t: float) -> GeneratingFamily:
        if not self._has_t:
            return GeneratingFamily(self.family.fiber_dim, self.family.q_signs,
                                    self.family.g, bound_radius=self.bound_radius,
                                    extra_vars=self.family.extra_vars)
        rest = tuple(v for v in self.family.extra_vars if v != "t")
        return GeneratingFamily(self.family.fiber_dim, self.family.q_signs,
                                exprs.substitute(self.family.g, "t", float(t)),
                                bound_radius=self.bound_radius, extra_vars=rest)

    def dt_at(self, q, w, t):
        """d/dt of the family at fixed (q, w)."""
        if not self._has_t:
            return np.zeros_like(np.asarray(q, dtype=float))
        env = {"q": q, "t": np.broadcast_to(np.asarray(t, dtype=float),
                                            np.asarray(q).shape)}
        if self.family.fiber_dim:
            w = np.asarray(w, dtype=float)
            for i in range(self.family.fiber_dim):
                env[f"w{i + 1}"] = w[..., i]
        out = exprs.evaluate(self._dt_expr, env)
        return np.broadcast_to(np.asarray(out, dtype=float), np.asarray(q).shape)


def vertical_speed(path: FamilyPath, pt, t0: float, tol_vertical: float = 1e-8) -> float:
    """Upward speed of the tracked curve point over a fiber-critical point:
    the t-derivative of the family at frozen (q, w)."""
    if abs(pt.hessian_det) <= tol_vertical:
        raise ValueError(
            "vertical point: the fiber Hessian is singular, speed undefined")
    return float(np.asarray(path.dt_at(np.asarray(pt.q), np.asarray(pt.w), t0)).reshape(()))


@dataclass
class SpeedReport:
    min_speed: float
    passed: bool
    argmin_t: float
    argmin_q: float


def check_positive_family(path: FamilyPath, n_q: int = 256,
                          tol_vertical: float = 1e-8) -> SpeedReport:
    """Minimum vertical speed over sampled t and the fiber-critical set;
    a strictly positive minimum certifies the generated path as positive."""
    best = (np.inf, np.nan, np.nan)
    for t in path.times():
        fam = path.slice_at(t)
        pts = [pt for pt in fiber_critical_set(fam, n_q=n_q)
               if abs(pt.hessian_det) > tol_vertical]
        if not pts:
            continue
        qs = np.array([pt.q for pt in pts])
        ws = np.array([pt.w for pt in pts]) if fam.fiber_dim else np.zeros((len(pts), 0))
        speeds = path.dt_at(qs, ws, t)
        i = int(np.argmin(speeds))
        if speeds[i] < best[0]:
            best = (float(speeds[i]), float(t), float(qs[i]))
    return SpeedReport(min_speed=best[0], passed=best[0] > 0.0,
                       argmin_t=best[1], argmin_q=best[2])


# ---------------------------------------------------------------------------
# diagram of critical values over t


@dataclass
class CerfBranch:
    id: int
    ts: list = field(default_factory=list)
    zs: list = field(default_factory=list)
    qs: list = field(default_factory=list)
    kinds: list = field(default_factory=list)


@dataclass(frozen=True)
class CerfEvent:
    t: float
    z: float
    kind: str  # "crossing" | "cusp" | "boundary_tangency"
    q: float


@dataclass
class CerfDiagram:
    branches: list
    events: list
    warnings: list
    times: np.ndarray


def _item_distance(a, b):
    # items are (z, q, w, fiber_det, kind)
    d = abs(a[0] - b[0])
    if np.isfinite(a[1]) and np.isfinite(b[1]):
        d += 0.5 * abs(float(wrap_delta(a[1] - b[1])))
    if a[2].size and b[2].size:
        d += 0.5 * float(np.linalg.norm(a[2] - b[2]))
    return d


def _items_at(fam, region_f, n_q, tol_newton):
    if region_f is None:
        cps = critical_points(fam, n_q=n_q, tol_newton=tol_newton)
        return [(cp.value, cp.q, np.asarray(cp.w, dtype=float),
                 cp.fiber_hessian_det, "interior") for cp in cps]
    out = []
    for g in generalized_critical_values(fam, region_f, n_q=n_q, tol_newton=tol_newton):
        out.append((g.value, g.q, np.asarray(g.w, dtype=float), np.nan, g.kind))
    return out


def cerf_diagram(path: FamilyPath, region_f=None, n_q: int = 256,
                 tol_newton: float = 1e-10, threads: int = 1) -> CerfDiagram:
    """Track critical values across t by nearest-neighbor continuation.

    Matches farther than 5x the median step motion are refused; refused or
    unmatched points open and close branches.  A pair of branches born (or
    dying) together at nearly the same value is classified as a cusp, a
    sign change of z_a - z_b as a crossing, and an interior critical point
    whose base point crosses the region boundary as a boundary tangency.
    """
    if path.n_t < 32:
        raise ValueError("n_t must be >= 32 for a diagram")
    times = path.times()
    item_lists = map_ordered(
        lambda t: _items_at(path.slice_at(t), region_f, n_q, tol_newton),
        times, threads=threads)

    z_all = [it[0] for items in item_lists for it in items]
    z_scale = max(1.0, (max(z_all) - min(z_all)) if z_all else 1.0)
    pair_tol = 10.0 * z_scale / path.n_t

    f_expr = None
    if region_f is not None:
        f_expr = region_f if isinstance(region_f, exprs.Expr) else exprs.parse(region_f)

    branches: list[CerfBranch] = []
    events: list[CerfEvent] = []
    warnings: list[str] = []
    active: dict[int, tuple] = {}

    def open_branch(t, item):
        br = CerfBranch(id=len(branches))
        branches.append(br)
        extend_branch(br.id, t, item)
        return br.id

    def extend_branch(bid, t, item):
        br = branches[bid]
        br.ts.append(float(t))
        br.zs.append(float(item[0]))
        br.qs.append(float(item[1]))
        br.kinds.append(item[4])
        active[bid] = item

    for j, items in enumerate(item_lists):
        t = float(times[j])
        if j == 0:
            for it in items:
                open_branch(t, it)
            continue
        prev_ids = list(active.keys())
        cand = []
        for ai, bid in enumerate(prev_ids):
            for ci, it in enumerate(items):
                if active[bid][4] != it[4]:
                    continue  # never match across interior/boundary kinds
                cand.append((_item_distance(active[bid], it), ai, ci))
        cand.sort(key=lambda x: (x[0], x[1], x[2]))
        used_a, used_c = set(), set()
        matches = []
        for d, ai, ci in cand:
            if ai in used_a or ci in used_c:
                continue
            used_a.add(ai)
            used_c.add(ci)
            matches.append((d, ai, ci))
        med = float(np.median([m[0] for m in matches])) if matches else 0.0
        thresh = 5.0 * max(med, 1e-9)
        accepted = [(ai, ci) for d, ai, ci in matches if d <= thresh]

        prev_snapshot = {bid: active[bid] for bid in prev_ids}
        matched_a = {ai for ai, _ in accepted}
        matched_c = {ci for _, ci in accepted}

        # crossings among surviving branches
        survivors = [(prev_ids[ai], ci) for ai, ci in accepted]
        for x in range(len(survivors)):
            for y in range(x + 1, len(survivors)):
                bx, cx = survivors[x]
                by, cy = survivors[y]
                d_prev = prev_snapshot[bx][0] - prev_snapshot[by][0]
                d_now = items[cx][0] - items[cy][0]
                crossed = abs(d_prev) > 1e-12 and abs(d_now) > 1e-12 and d_prev * d_now < 0
                touched = abs(d_prev) > 1e-12 and abs(d_now) <= 1e-12  # hits a sample
                if crossed or touched:
                    frac = abs(d_prev) / (abs(d_prev) + abs(d_now))
                    tc = float(times[j - 1]) + frac * (t - float(times[j - 1]))
                    zc = prev_snapshot[bx][0] + frac * (items[cx][0] - prev_snapshot[bx][0])
                    qc = items[cx][1]
                    events.append(CerfEvent(t=tc, z=zc, kind="crossing", q=float(qc)))

        # boundary tangency: interior branch base point crossing f = 0
        if f_expr is not None:
            for ai, ci in accepted:
                it_prev, it_now = prev_snapshot[prev_ids[ai]], items[ci]
                if it_now[4] != "interior":
                    continue
                if not (np.isfinite(it_prev[1]) and np.isfinite(it_now[1])):
                    continue
                f0 = float(exprs.evaluate(f_expr, {"q": it_prev[1]}))
                f1 = float(exprs.evaluate(f_expr, {"q": it_now[1]}))
                if f0 * f1 < 0:
                    events.append(CerfEvent(t=t, z=float(it_now[0]),
                                            kind="boundary_tangency", q=float(it_now[1])))

        # deaths: unmatched previous branches, paired up as cusps if close
        dead = [prev_ids[ai] for ai in range(len(prev_ids)) if ai not in matched_a]
        surviving_prev = [prev_snapshot[prev_ids[ai]] for ai, _ in accepted]
        _classify_pairs([prev_snapshot[bid] for bid in dead], float(times[j - 1]),
                        pair_tol, events, warnings, "died", context=surviving_prev)
        for bid in dead:
            del active[bid]

        # survivors extend, births open new branches
        for ai, ci in accepted:
            extend_branch(prev_ids[ai], t, items[ci])
        born_items = [items[ci] for ci in range(len(items)) if ci not in matched_c]
        surviving_now = [items[ci] for _, ci in accepted]
        _classify_pairs(born_items, t, pair_tol, events, warnings, "appeared",
                        context=surviving_now)
        for it in born_items:
            open_branch(t, it)

    return CerfDiagram(branches=branches, events=events, warnings=warnings, times=times)


def _classify_pairs(items, t, pair_tol, events, warnings, verb, context=()):
    """Pair up simultaneous births/deaths; close pairs are cusps.

    A leftover that sits next to a surviving branch point (``context``) is
    also a cusp: the sampling grid hit the tip, so the pair separated one
    step late.  Anything else is a continuation failure worth reporting.
    """
    if not items:
        return
    left = list(range(len(items)))
    while left:
        i = left.pop(0)
        best_j, best_d = None, np.inf
        for j in left:
            d = _item_distance(items[i], items[j])
            if d < best_d:
                best_j, best_d = j, d
        if best_j is not None and best_d <= pair_tol:
            left.remove(best_j)
            z = 0.5 * (items[i][0] + items[best_j][0])
            q = items[i][1]
            events.append(CerfEvent(t=float(t), z=float(z), kind="cusp",
                                    q=float(q) if np.isfinite(q) else float("nan")))
        elif context and min(_item_distance(items[i], c) for c in context) <= pair_tol:
            events.append(CerfEvent(t=float(t), z=float(items[i][0]), kind="cusp",
                                    q=float(items[i][1]) if np.isfinite(items[i][1])
                                    else float("nan")))
        else:
            warnings.append(
                f"branch {verb} without a partner at t={t:.6g}, z={items[i][0]:.6g}")


# ---------------------------------------------------------------------------
# min-max trajectories and slopes


@dataclass
class Trajectory:
    times: np.ndarray
    curves: np.ndarray          # shape (n_t, b)
    strict_end_to_end: bool
    weak_steps: bool            # every step weakly increasing
    strict_steps: bool          # every step strictly increasing
    b: int


def viterbo_trajectory(path: FamilyPath, region_f=None, n_q: int = 256,
                       n_w: int = 65, threads: int = 1) -> Trajectory:
    """Min-max values at each sampled t, with monotonicity verdicts."""
    times = path.times()

    def one(t):
        fam = path.slice_at(t)
        if region_f is None:
            return viterbo_numbers(fam, n_q=n_q, n_w=n_w).values
        return viterbo_numbers_with_boundary(fam, region_f, n_q=n_q, n_w=n_w).values

    rows = map_ordered(one, times, threads=threads)
    curves = np.asarray(rows, dtype=float)
    steps = np.diff(curves, axis=0)
    return Trajectory(
        times=times,
        curves=curves,
        strict_end_to_end=bool(np.all(curves[-1] > curves[0])),
        weak_steps=bool(np.all(steps >= -1e-12)),
        strict_steps=bool(np.all(steps > 0)),
        b=curves.shape[1],
    )


@dataclass
class SlopeReport:
    min_slope: float
    max_slope: float
    passed: bool | None  # None when the path was not certified positive
    n_checked: int


def slope_check(diagram: CerfDiagram, positive: bool,
                event_radius: int = 2) -> SlopeReport:
    """Finite-difference slopes along every branch, excluding samples within
    ``event_radius`` samples of an event; verdict only for positive paths."""
    times = diagram.times
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    event_ts = np.array([e.t for e in diagram.events]) if diagram.events else None
    min_slope, max_slope, n_checked = np.inf, -np.inf, 0
    for br in diagram.branches:
        if len(br.ts) < 3:
            continue
        ts = np.asarray(br.ts)
        zs = np.asarray(br.zs)
        slopes = np.gradient(zs, ts)
        keep = np.ones(ts.shape, dtype=bool)
        keep[:event_radius] = keep[-event_radius:] = False  # branch ends are events
        if event_ts is not None:
            for te in event_ts:
                keep &= np.abs(ts - te) > event_radius * dt
        if not keep.any():
            continue
        n_checked += int(keep.sum())
        min_slope = min(min_slope, float(slopes[keep].min()))
        max_slope = max(max_slope, float(slopes[keep].max()))
    passed = (min_slope > 0.0) if positive else None
    return SlopeReport(min_slope=min_slope, max_slope=max_slope,
                       passed=passed, n_checked=n_checked)
