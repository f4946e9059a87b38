"""Boundary reduction over the two-element field.

Columns are sorted index lists (sparse mod-2 vectors); adding two columns
is a two-pointer symmetric-difference merge.  The reduction runs dimension
by dimension from the top with clearing: the birth column of every pair
found is zeroed instead of being reduced later.  Output order is
deterministic for a given complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filtration import FilteredComplex

__all__ = ["PersistencePair", "EssentialClass", "PersistenceResult", "reduce_filtration"]


@dataclass(frozen=True)
class PersistencePair:
    dim: int
    birth: float
    death: float
    birth_cell: int
    death_cell: int


@dataclass(frozen=True)
class EssentialClass:
    dim: int
    birth: float
    cell: int


@dataclass
class PersistenceResult:
    pairs: list
    essentials: list

    def finite_pairs(self, min_persistence: float = 0.0):
        return [p for p in self.pairs if p.death - p.birth > min_persistence]

    def betti_at(self, level: float, dim: int) -> int:
        alive = sum(1 for p in self.pairs
                    if p.dim == dim and p.birth <= level < p.death)
        alive += sum(1 for e in self.essentials if e.dim == dim and e.birth <= level)
        return alive


def _xor_merge(a, b):
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif x > y:
            out.append(y)
            j += 1
        else:
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def reduce_filtration(X: FilteredComplex) -> PersistenceResult:
    n = X.n_cells
    dims = X.dims
    values = X.values
    indptr = X.face_indptr
    data = X.face_data.tolist()  # shared int objects across column slices

    pivot_owner: dict[int, int] = {}
    reduced: dict[int, list] = {}
    cleared = bytearray(n)
    paired = bytearray(n)
    raw_pairs = []

    max_dim = int(dims.max()) if n else 0
    by_dim = [np.nonzero(dims == d)[0].tolist() for d in range(max_dim + 1)]
    for d in range(max_dim, 0, -1):
        for j in by_dim[d]:
            if cleared[j]:
                continue
            col = data[indptr[j]:indptr[j + 1]]
            while col:
                owner = pivot_owner.get(col[-1])
                if owner is None:
                    break
                col = _xor_merge(col, reduced[owner])
            if col:
                low = col[-1]
                pivot_owner[low] = j
                reduced[j] = col
                cleared[low] = 1
                paired[low] = 1
                paired[j] = 1
                raw_pairs.append((low, j))

    pairs = [
        PersistencePair(dim=int(dims[i]), birth=float(values[i]),
                        death=float(values[j]), birth_cell=i, death_cell=j)
        for i, j in sorted(raw_pairs)
    ]
    essentials = [
        EssentialClass(dim=int(dims[i]), birth=float(values[i]), cell=i)
        for i in range(n) if not paired[i]
    ]
    essentials.sort(key=lambda e: (e.birth, e.dim, e.cell))
    return PersistenceResult(pairs=pairs, essentials=essentials)
