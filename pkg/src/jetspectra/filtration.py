"""Lower-star cubical filtrations on (circle or arcs) x fiber ball.

Cells are products of vertex/edge extents per axis; each cell enters the
filtration at the maximum of F over its vertices, which keeps filtration
values monotone under the face relation.  Two kinds of cells form the
collapsed subcomplex of the relative pair:

* cells whose value is <= -C with C = 2 sup|g| + 1 (the bottom), and
* cells lying inside an outer fiber face w_i = +-R of a coordinate whose
  quadratic sign is -1 (forced marking; these faces stand in for the far
  negative end of the quadratic form after truncation to the ball).

The collapsed cells are removed and their incidences dropped, so the
reduction downstream computes exactly the homology of the pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exprs
from .exprs import Expr, parse
from .families import GeneratingFamily
from .jets import TWO_PI

__all__ = [
    "RegularityError",
    "FiltrationBounds",
    "FilteredComplex",
    "build_filtration",
    "region_mask",
    "region_arcs",
]


class RegularityError(ValueError):
    """0 failed to be a regular value of the region function on the grid."""


@dataclass(frozen=True)
class FiltrationBounds:
    below: float  # C: the collapsed bottom is F <= -C
    above: float  # A: all births of interest sit in (-C, A]


@dataclass
class FilteredComplex:
    """Cells sorted by (value, dimension, construction index)."""

    values: np.ndarray
    dims: np.ndarray
    face_indptr: np.ndarray
    face_data: np.ndarray
    base_index: np.ndarray
    fiber_index: np.ndarray
    ext_bits: np.ndarray
    boundary_adjacent: np.ndarray
    bounds: FiltrationBounds
    fiber_dim: int
    quad_index: int
    qs: np.ndarray
    ws: np.ndarray | None
    vertex_values: np.ndarray
    region: np.ndarray | None
    n_relative: int

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    def faces_of(self, i: int) -> np.ndarray:
        return self.face_data[self.face_indptr[i]:self.face_indptr[i + 1]]

    def birth_vertex(self, i: int):
        """Corner of cell i carrying its filtration value: (q, w, value)."""
        tau = int(self.ext_bits[i])
        n_q = self.qs.shape[0]
        best = None
        ext = [a for a in range(1 + self.fiber_dim) if (tau >> a) & 1]
        for corner in range(1 << len(ext)):
            bi = int(self.base_index[i])
            fj = self.fiber_index[i].copy()
            for pos, a in enumerate(ext):
                if (corner >> pos) & 1:
                    if a == 0:
                        bi = (bi + 1) % n_q
                    else:
                        fj[a - 1] += 1
            value = float(self.vertex_values[(bi, *fj)])
            if best is None or value > best[2]:
                best = (bi, fj, value)
        bi, fj, value = best
        w = self.ws[fj] if self.fiber_dim else np.zeros(0)
        return float(self.qs[bi]), w, value


def _as_region_expr(f) -> Expr:
    return f if isinstance(f, Expr) else parse(f, fiber_dim=0)


def region_mask(f, n_q: int, reg_tol: float = 1e-8):
    """Grid mask of {f >= 0} plus the regularity check of 0."""
    f = _as_region_expr(f)
    qs = np.arange(n_q) * TWO_PI / n_q
    fvals = np.broadcast_to(np.asarray(exprs.evaluate(f, {"q": qs}), dtype=float), qs.shape)
    fder = np.broadcast_to(
        np.asarray(exprs.evaluate(exprs.differentiate(f, "q"), {"q": qs}), dtype=float),
        qs.shape)
    if np.any((np.abs(fvals) < reg_tol) & (np.abs(fder) < reg_tol)):
        raise RegularityError(
            "0 is not a regular value of the region function on this grid")
    return fvals >= 0.0


def region_arcs(mask: np.ndarray):
    """Connected runs of True in a cyclic mask, as lists of indices."""
    n = mask.shape[0]
    if mask.all():
        return [list(range(n))]
    if not mask.any():
        return []
    # rotate so position 0 is outside the region, then split plain runs
    start = int(np.argmin(mask))
    rolled = np.roll(mask, -start)
    arcs = []
    cur = []
    for i in range(n):
        if rolled[i]:
            cur.append((i + start) % n)
        elif cur:
            arcs.append(cur)
            cur = []
    if cur:
        arcs.append(cur)
    return arcs


def build_filtration(family: GeneratingFamily, n_q: int = 256, n_w: int = 65,
                     region_f=None, reg_tol: float = 1e-8) -> FilteredComplex:
    """Lower-star filtration of F over the region (all of the circle, or
    {f >= 0}) crossed with the fiber ball [-R, R]^K."""
    family._require_closed()
    if n_q < 64:
        raise ValueError("n_q must be >= 64")
    K = family.fiber_dim
    if K:
        if n_w is None or n_w < 33:
            raise ValueError("n_w must be >= 33 per fiber axis")
        if n_w % 2 == 0:
            raise ValueError("n_w must be odd so the fiber grid contains 0")
    qs = np.arange(n_q) * TWO_PI / n_q

    if region_f is not None:
        mask = region_mask(region_f, n_q, reg_tol)
        if not mask.any():
            raise ValueError("region {f >= 0} contains no grid point")
    else:
        mask = None

    R = family.bound_radius
    ws = np.linspace(-R, R, n_w) if K else None
    mesh = np.meshgrid(qs, *([ws] * K), indexing="ij")
    env = {"q": mesh[0]}
    for i in range(K):
        env[f"w{i + 1}"] = mesh[i + 1]
    gvals = np.broadcast_to(
        np.asarray(exprs.evaluate(family.g, env), dtype=float), mesh[0].shape)
    quad = np.zeros_like(mesh[0])
    for i in range(K):
        quad = quad + family.q_signs[i] * mesh[i + 1] ** 2
    V = gvals + quad
    C = 2.0 * float(np.max(np.abs(gvals))) + 1.0
    bounds = FiltrationBounds(below=C, above=C)

    n_axes = 1 + K
    infos = []
    total = 0
    n_relative = 0
    for tau in range(1 << n_axes):
        ext = [a for a in range(n_axes) if (tau >> a) & 1]
        dim = len(ext)
        shape = (n_q,) + tuple(n_w - 1 if (a in ext) else n_w for a in range(1, n_axes))
        val = None
        for corner in range(1 << dim):
            view = V
            for pos, a in enumerate(ext):
                upper = (corner >> pos) & 1
                if a == 0:
                    if upper:
                        view = np.roll(view, -1, axis=0)
                else:
                    sl = [slice(None)] * n_axes
                    sl[a] = slice(1, None) if upper else slice(0, n_w - 1)
                    view = view[tuple(sl)]
            val = view if val is None else np.maximum(val, view)
        val = np.ascontiguousarray(val)

        if mask is not None:
            base_ok = mask & np.roll(mask, -1) if 0 in ext else mask
            valid = np.broadcast_to(
                base_ok.reshape((n_q,) + (1,) * K), shape).copy()
        else:
            valid = np.ones(shape, dtype=bool)

        forced = np.zeros(shape, dtype=bool)
        for a in range(1, n_axes):
            if family.q_signs[a - 1] == -1 and a not in ext:
                sl = [slice(None)] * n_axes
                sl[a] = 0
                forced[tuple(sl)] = True
                sl[a] = n_w - 1
                forced[tuple(sl)] = True
        relative = (val <= -C) | forced
        kept = valid & ~relative
        n_relative += int(np.sum(valid & relative))

        ids = np.full(shape, -1, dtype=np.int64)
        count = int(kept.sum())
        ids[kept] = np.arange(total, total + count)
        total += count
        infos.append({"tau": tau, "ext": ext, "dim": dim, "val": val,
                      "kept": kept, "ids": ids})

    n = total
    values = np.empty(n)
    dims = np.empty(n, dtype=np.int16)
    base_index = np.empty(n, dtype=np.int32)
    fiber_index = np.zeros((n, K), dtype=np.int32)
    ext_bits = np.empty(n, dtype=np.int16)
    boundary_adj = np.zeros(n, dtype=bool)
    cell_of_face = []
    face_ids = []

    arc_end = None
    if mask is not None:
        arc_end = mask & (~np.roll(mask, 1) | ~np.roll(mask, -1))

    for info in infos:
        kept = info["kept"]
        if not kept.any():
            continue
        pos = np.nonzero(kept)
        gid = info["ids"][kept]
        values[gid] = info["val"][kept]
        dims[gid] = info["dim"]
        base_index[gid] = pos[0]
        for a in range(1, n_axes):
            fiber_index[gid, a - 1] = pos[a]
        ext_bits[gid] = info["tau"]
        if arc_end is not None:
            flag = arc_end[pos[0]]
            if 0 in info["ext"]:
                flag = flag | arc_end[(pos[0] + 1) % n_q]
            boundary_adj[gid] = flag
        for a in info["ext"]:
            ids2 = infos[info["tau"] & ~(1 << a)]["ids"]
            if a == 0:
                low = ids2[pos]
                high = ids2[((pos[0] + 1) % n_q,) + pos[1:]]
            else:
                low = ids2[pos]
                upper_pos = list(pos)
                upper_pos[a] = pos[a] + 1
                high = ids2[tuple(upper_pos)]
            for f in (low, high):
                cell_of_face.append(gid)
                face_ids.append(f)

    if cell_of_face:
        cell_arr = np.concatenate(cell_of_face)
        face_arr = np.concatenate(face_ids)
        keep = face_arr >= 0  # faces in the collapsed subcomplex are dropped
        cell_arr = cell_arr[keep]
        face_arr = face_arr[keep]
    else:
        cell_arr = np.zeros(0, dtype=np.int64)
        face_arr = np.zeros(0, dtype=np.int64)

    order = np.lexsort((np.arange(n), dims, values))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)

    cell_rank = rank[cell_arr]
    face_rank = rank[face_arr]
    sub = np.lexsort((face_rank, cell_rank))
    cell_rank = cell_rank[sub]
    face_rank = face_rank[sub]
    counts = np.bincount(cell_rank, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])

    return FilteredComplex(
        values=values[order],
        dims=dims[order],
        face_indptr=indptr,
        face_data=face_rank,
        base_index=base_index[order],
        fiber_index=fiber_index[order],
        ext_bits=ext_bits[order],
        boundary_adjacent=boundary_adj[order],
        bounds=bounds,
        fiber_dim=K,
        quad_index=family.index,
        qs=qs,
        ws=ws,
        vertex_values=V,
        region=mask,
        n_relative=n_relative,
    )
