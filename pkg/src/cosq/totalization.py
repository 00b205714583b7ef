"""Totalization of a cosimplicial simplicial module as explicit solution
spaces, the comparison map into the truncated total complex, and the two
interchange maps.

A level-q element of the totalization is a natural family of maps out of
the skeleta-times-simplex spaces.  Conormalizing and normalizing both sides
turns such a family into a map of double complexes, determined freely by
its values on the cells whose first component is surjective; the remaining
cells are reached by the horizontal differential.  Solving the vertical
commutation constraints on those free values gives the solution space, and
every downstream map (faces, degeneracies, the comparison map, the
interchanges) is evaluated by reading off cell values.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional

from .cosimplicial import Bicomplex, FilteredComplex
from .delta import enumerate_shuffles
from .gf2 import BitMatrix, LinearSystem, kernel_basis
from .simplicial import SimplicialModule, linearize, monotone_tuples, normalize


def _epis(n: int, p: int):
    """Monotone surjections [n] ->> [p], as value tuples."""
    out = []
    for rep in combinations(range(n), n - p):
        rs = set(rep)
        vals = []
        v = 0
        for i in range(n + 1):
            vals.append(v)
            if i not in rs:
                v += 1
        out.append(tuple(vals))
    return out


def _repeats(vals) -> frozenset:
    return frozenset(i for i in range(len(vals) - 1) if vals[i] == vals[i + 1])


def _drop(vals, i):
    return vals[:i] + vals[i + 1 :]


class TotModule:
    """Solution spaces of the totalization, one per simplicial level."""

    def __init__(self, v_bicomplex: Bicomplex, ell: int, q_max: int):
        self.v = v_bicomplex
        self.ell = ell
        self.p_top = min(ell, v_bicomplex.p_max)
        self.q_max = q_max
        self.layout = {}
        self.solutions = {}
        for q in range(q_max + 1):
            self._solve_level(q)
        self.module = self._as_simplicial_module()

    # -- layout ---------------------------------------------------------------

    def _cells(self, q: int):
        cells = []
        for p in range(self.p_top + 1):
            for n in range(p, min(p + q, self.v.n_max) + 1):
                cells.append((p, n))
        return cells

    def _solve_level(self, q: int) -> None:
        epi = {}
        epi_index = {}
        offset = {}
        totals = 0
        cells = self._cells(q)
        for (p, n) in cells:
            # enumerate even when the target cell is zero-dimensional: the
            # commutation equations there still constrain lower cells
            basis = []
            for x in _epis(n, p):
                rx = _repeats(x)
                for b in monotone_tuples(n, q):
                    if rx & _repeats(b):
                        continue
                    basis.append((x, b))
            epi[(p, n)] = basis
            epi_index[(p, n)] = {e: i for i, e in enumerate(basis)}
            offset[(p, n)] = totals
            totals += len(basis) * self.v.dim(p, n)
        layout = {
            "cells": cells,
            "epi": epi,
            "epi_index": epi_index,
            "offset": offset,
            "total": totals,
        }
        self.layout[q] = layout

        expr_cache = {}

        def value_expr(p, n, x, b):
            """Value of the unknown map on a conormalized cell element, as a
            list of unknown-masks (one per target coordinate)."""
            key = (p, n, x, b)
            if key in expr_cache:
                return expr_cache[key]
            dim = self.v.dim(p, n)
            if 0 not in x:
                # first component misses 0: reached by the horizontal
                # differential from one cosimplicial degree down
                x2 = tuple(v - 1 for v in x)
                sub = value_expr(p - 1, n, x2, b)
                dh = self.v.horizontal(p - 1, n)
                out = []
                for r in range(dim):
                    acc = 0
                    row = dh.rows[r]
                    while row:
                        low = row & -row
                        acc ^= sub[low.bit_length() - 1]
                        row ^= low
                    out.append(acc)
            else:
                idx = epi_index[(p, n)].get((x, b))
                if idx is None:
                    raise KeyError(f"not a free cell: {(p, n, x, b)}")
                base = offset[(p, n)] + idx * dim
                out = [1 << (base + r) for r in range(dim)]
            expr_cache[key] = out
            return out

        rows = []
        for (p, n) in cells:
            tdim = self.v.dim(p, n - 1) if n >= 1 else 0
            if tdim == 0:
                continue
            dv = self.v.vertical(p, n)
            for (x, b) in epi[(p, n)]:
                rhs = [0] * tdim
                for i in range(n + 1):
                    x2 = _drop(x, i)
                    b2 = _drop(b, i)
                    if _repeats(x2) & _repeats(b2):
                        continue
                    hit = set(x2)
                    missing = [u for u in range(p + 1) if u not in hit]
                    if any(u >= 1 for u in missing):
                        continue
                    sub = value_expr(p, n - 1, x2, b2)
                    for r in range(tdim):
                        rhs[r] ^= sub[r]
                dim = self.v.dim(p, n)
                idx = epi_index[(p, n)][(x, b)]
                base = offset[(p, n)] + idx * dim
                for r in range(tdim):
                    lhs = 0
                    row = dv.rows[r]
                    while row:
                        low = row & -row
                        lhs ^= 1 << (base + low.bit_length() - 1)
                        row ^= low
                    rows.append(lhs ^ rhs[r])
        matrix = BitMatrix(len(rows), totals, rows)
        self.solutions[q] = kernel_basis(matrix)

    # -- reading off values -----------------------------------------------------

    def dim(self, q: int) -> int:
        return self.solutions[q].dim

    def value_cn(self, q: int, sol: int, p: int, n: int, x, b) -> int:
        """Conormalized-cell value of a solution on the cell element (x, b)."""
        dim = self.v.dim(p, n)
        if dim == 0:
            return 0
        if 0 not in x:
            x2 = tuple(v - 1 for v in x)
            sub = self.value_cn(q, sol, p - 1, n, x2, b)
            return self.v.horizontal(p - 1, n).apply(sub)
        layout = self.layout[q]
        idx = layout["epi_index"][(p, n)].get((x, b))
        if idx is None:
            raise KeyError(f"not a free cell: {(p, n, x, b)}")
        base = layout["offset"][(p, n)] + idx * dim
        return (sol >> base) & ((1 << dim) - 1)

    def element_from_values(self, q: int, values) -> int:
        """Pack {(p, n, x, b): coords} into an unknown-assignment vector."""
        layout = self.layout[q]
        out = 0
        for (p, n), basis in layout["epi"].items():
            dim = self.v.dim(p, n)
            for i, e in enumerate(basis):
                coords = values.get((p, n) + e, 0)
                out |= coords << (layout["offset"][(p, n)] + i * dim)
        return out

    def coords(self, q: int, sol: int) -> int:
        return self.solutions[q].coords(sol)

    def from_coords(self, q: int, c: int) -> int:
        return self.solutions[q].from_coords(c)

    # -- the simplicial structure ------------------------------------------------

    def _face_image(self, q: int, i: int, sol: int) -> int:
        out = 0
        layout = self.layout[q - 1]
        for (p, n), basis in layout["epi"].items():
            dim = self.v.dim(p, n)
            for e_idx, (x, b) in enumerate(basis):
                b2 = tuple(v if v < i else v + 1 for v in b)
                val = self.value_cn(q, sol, p, n, x, b2)
                out |= val << (layout["offset"][(p, n)] + e_idx * dim)
        return out

    def _degen_image(self, q: int, i: int, sol: int) -> int:
        out = 0
        layout = self.layout[q + 1]
        for (p, n), basis in layout["epi"].items():
            dim = self.v.dim(p, n)
            for e_idx, (x, b) in enumerate(basis):
                b2 = tuple(v if v <= i else v - 1 for v in b)
                if _repeats(x) & _repeats(b2):
                    continue
                val = self.value_cn(q, sol, p, n, x, b2)
                out |= val << (layout["offset"][(p, n)] + e_idx * dim)
        return out

    def _as_simplicial_module(self) -> SimplicialModule:
        dims = [self.dim(q) for q in range(self.q_max + 1)]
        face = {}
        degen = {}
        for q in range(1, self.q_max + 1):
            for i in range(q + 1):
                cols = [
                    self.coords(q - 1, self._face_image(q, i, sol))
                    for sol in self.solutions[q].basis
                ]
                face[(q, i)] = BitMatrix.from_columns(dims[q - 1], cols)
        for q in range(self.q_max):
            for i in range(q + 1):
                cols = [
                    self.coords(q + 1, self._degen_image(q, i, sol))
                    for sol in self.solutions[q].basis
                ]
                degen[(q, i)] = BitMatrix.from_columns(dims[q + 1], cols)
        return SimplicialModule(self.q_max, dims, face, degen)


def tot_ell(v_bicomplex: Bicomplex, ell: Optional[int], q_max: int) -> TotModule:
    """Totalization truncated at skeleton level ell (None means the full
    stored cosimplicial range)."""
    if ell is None:
        ell = v_bicomplex.p_max
    if ell > v_bicomplex.p_max:
        raise ValueError("skeleton level exceeds the stored cosimplicial range")
    return TotModule(v_bicomplex, ell, q_max)


def shuffle_cell_args(k: int, q: int):
    """The (epi, epi) bisimplex pairs of the canonical class at (k, k+q)."""
    out = []
    for tau in enumerate_shuffles(k, q):
        x_rep = set(tau.perm[k:])
        b_rep = set(tau.perm[:k])
        x = []
        v = 0
        for i in range(k + q):
            x.append(v)
            if i not in x_rep:
                v += 1
        x.append(v)
        b = []
        v = 0
        for i in range(k + q):
            b.append(v)
            if i not in b_rep:
                v += 1
        b.append(v)
        out.append((tuple(x), tuple(b)))
    return out


def phi_matrices(tot: TotModule, filtered: FilteredComplex):
    """The comparison map from the totalization into the total complex.

    Returns {q: matrix} taking level-q solution coordinates to degree-q
    chains of the filtered total complex; evaluation pairs every solution
    with the canonical shuffle classes of the cell bisimplices.
    """
    maps = {}
    for q in range(tot.q_max + 1):
        cols = []
        for sol in tot.solutions[q].basis:
            chain = 0
            for k in range(tot.p_top + 1):
                n = k + q
                if n > tot.v.n_max or tot.v.dim(k, n) == 0:
                    continue
                if (q, k) not in filtered.offsets:
                    continue
                acc = 0
                for (x, b) in shuffle_cell_args(k, q):
                    acc ^= tot.value_cn(q, sol, k, n, x, b)
                chain ^= filtered.inject_cell(q, k, acc)
            cols.append(chain)
        maps[q] = BitMatrix.from_columns(filtered.dim(q), cols)
    return maps


def phi_on_normalized(tot: TotModule, filtered: FilteredComplex):
    """phi as a chain map on normalized chains of the totalization."""
    raw = phi_matrices(tot, filtered)
    ntot = normalize(tot.module)
    maps = {}
    for q in range(tot.q_max + 1):
        cols = [raw[q].apply(rep) for rep in ntot.presentations[q].reps]
        maps[q] = BitMatrix.from_columns(filtered.dim(q), cols)
        for v in ntot.presentations[q].modulus.basis:
            if raw[q].apply(v):
                raise ValueError("comparison map does not kill degenerate chains")
    return maps, ntot


def tot_pushforward(src: TotModule, tgt: TotModule, cell_mats) -> dict:
    """Functoriality: compose solutions with a cellwise cosimplicial map.

    `cell_mats[(p, n)]` maps source cells to target cells and must commute
    with both differentials.  Returns {q: matrix} on solution coordinates.
    """
    out = {}
    for q in range(min(src.q_max, tgt.q_max) + 1):
        cols = []
        layout = tgt.layout[q]
        for sol in src.solutions[q].basis:
            vec = 0
            for (p, n), basis in layout["epi"].items():
                dim = tgt.v.dim(p, n)
                if dim == 0:
                    continue
                mat = cell_mats.get((p, n))
                if mat is None:
                    continue
                for e_idx, (x, b) in enumerate(basis):
                    val = mat.apply(src.value_cn(q, sol, p, n, x, b))
                    vec |= val << (layout["offset"][(p, n)] + e_idx * dim)
            cols.append(tgt.coords(q, vec))
        out[q] = BitMatrix.from_columns(tgt.dim(q), cols)
    return out


# -- honest values of solutions ----------------------------------------------------


class DenseLevels:
    """Dense view of a based cosimplicial module built from spaces: per
    cosimplicial degree the linearized module, its normalization, and the
    operator matrices, aligned with the conormalized cells of the based
    bicomplex."""

    def __init__(self, spaces, coface_label, codegen_label, bicomplex: Bicomplex):
        self.spaces = spaces
        self.P = len(spaces) - 1
        self.modules = [linearize(x) for x in spaces]
        self.normalized = [normalize(m) for m in self.modules]
        self.bicomplex = bicomplex
        self._index = [
            [{lab: i for i, lab in enumerate(level)} for level in m.labels]
            for m in self.modules
        ]
        self._coface_label = coface_label
        self._codegen_label = codegen_label
        self._coface_cache = {}
        self._codegen_cache = {}
        self._system_cache = {}
        self._class_rows_cache = {}

    def label_index(self, p: int, n: int, label) -> Optional[int]:
        return self._index[p][n].get(label)

    def coface_mat(self, p: int, k: int, n: int) -> BitMatrix:
        key = (p, k, n)
        if key not in self._coface_cache:
            src = self.modules[p - 1]
            tgt = self.modules[p]
            entries = []
            for col, lab in enumerate(src.labels[n]):
                img = self._coface_label(p, k, n, lab)
                idx = self.label_index(p, n, img)
                if idx is not None:
                    entries.append((idx, col))
            self._coface_cache[key] = BitMatrix.from_entries(tgt.dim(n), src.dim(n), entries)
        return self._coface_cache[key]

    def codegen_mat(self, p: int, k: int, n: int) -> BitMatrix:
        key = (p, k, n)
        if key not in self._codegen_cache:
            src = self.modules[p]
            tgt = self.modules[p - 1]
            entries = []
            for col, lab in enumerate(src.labels[n]):
                img = self._codegen_label(p, k, n, lab)
                idx = self.label_index(p - 1, n, img)
                if idx is not None:
                    entries.append((idx, col))
            self._codegen_cache[key] = BitMatrix.from_entries(tgt.dim(n), src.dim(n), entries)
        return self._codegen_cache[key]

    def class_rows(self, p: int, n: int):
        """Rows reading off the conormalized-cell coordinates of a level
        vector: the normalized class, restricted to the stored cell cores."""
        key = (p, n)
        if key not in self._class_rows_cache:
            cell_basis = self.bicomplex.hooks["cell_basis"][(p, n)]
            pres = self.normalized[p].presentations[n]
            unit_coords = [pres.coords(1 << j) for j in range(self.modules[p].dim(n))]
            rows = []
            for core in cell_basis:
                core_idx = self.label_index(p, n, core)
                target = pres.coords(1 << core_idx)
                if target.bit_count() != 1:
                    raise ValueError("core is not a canonical normalized coordinate")
                row = 0
                for j, c in enumerate(unit_coords):
                    if c & target:
                        row |= 1 << j
                rows.append(row)
            self._class_rows_cache[key] = rows
        return self._class_rows_cache[key]

    def value_system(self, p: int, n: int) -> LinearSystem:
        """The pinned linear system for an epi-cell value at (p, n)."""
        key = (p, n)
        if key not in self._system_cache:
            mod = self.modules[p]
            rows = []
            if n >= 1:
                for i in range(n + 1):
                    rows.extend(mod.face(n, i).rows)
            for j in range(p):
                rows.extend(self.codegen_mat(p, j, n).rows)
            rows.extend(self.class_rows(p, n))
            system = LinearSystem(BitMatrix(len(rows), mod.dim(n), rows))
            if system.kernel_dim() != 0:
                raise ValueError(f"value system underdetermined at {(p, n)}")
            self._system_cache[key] = system
        return self._system_cache[key]


class TotValues:
    """Honest (unnormalized) values of one totalization element.

    The cell data of a solution pins each value through faces, the
    codegeneracy naturality, and its conormalized class; values on
    degenerate or coface-reachable cells follow from the structure maps.
    """

    def __init__(self, tot: TotModule, dense: DenseLevels, q: int, sol: int):
        self.tot = tot
        self.dense = dense
        self.q = q
        self.sol = sol
        self._memo = {}

    def value(self, p: int, n: int, x, b) -> int:
        key = (p, n, x, b)
        if key in self._memo:
            return self._memo[key]
        rx = _repeats(x)
        rb = _repeats(b)
        common = rx & rb
        mod = self.dense.modules[p]
        if common:
            keep = [i for i in range(n + 1) if i == 0 or (i - 1) not in common]
            x2 = tuple(x[i] for i in keep)
            b2 = tuple(b[i] for i in keep)
            vec = self.value(p, n - len(common), x2, b2)
            level = n - len(common)
            for j in sorted(common):
                vec = mod.degen(level, j).apply(vec)
                level += 1
            out = vec
        else:
            hit = set(x)
            missing = [u for u in range(p + 1) if u not in hit]
            if missing:
                k = missing[0]
                x2 = tuple(v if v < k else v - 1 for v in x)
                out = self.dense.coface_mat(p, k, n).apply(self.value(p - 1, n, x2, b))
            else:
                system = self.dense.value_system(p, n)
                rhs = 0
                bit = 0
                if n >= 1:
                    for i in range(n + 1):
                        sub = self.value(p, n - 1, _drop(x, i), _drop(b, i))
                        rhs |= sub << bit
                        bit += self.dense.modules[p].dim(n - 1)
                for j in range(p):
                    sub = self.value(p - 1, n, tuple(v if v <= j else v - 1 for v in x), b)
                    rhs |= sub << bit
                    bit += self.dense.modules[p - 1].dim(n)
                cls = self.tot.value_cn(self.q, self.sol, p, n, x, b)
                rhs |= cls << bit
                out = system.solve(rhs)
                if out is None:
                    raise ValueError(f"inconsistent value system at {(p, n, x, b)}")
        self._memo[key] = out
        return out
