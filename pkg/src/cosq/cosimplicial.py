"""Cosimplicial objects, conormalization, bicomplexes and total complexes.

A bicomplex here is a second-quadrant double complex with cells (p, n):
column -p, chain degree n.  The horizontal differential (induced by the
zeroth coface after conormalization) moves (p, n) -> (p+1, n); the vertical
one is the chain differential (p, n) -> (p, n-1).  Both lower the total
degree n - p by one.
"""

from __future__ import annotations

from typing import Optional

from .chains import ChainComplex
from .gf2 import (
    BitMatrix,
    QuotientPresentation,
    Subspace,
    induced_matrix,
)
from .simplicial import SimplicialModule, normalize, sm_tensor


class SpectralWindow:
    """Bookkeeping for the region where a truncated computation is exact.

    Cells (p, n) with p <= p_max and n <= n_max are stored; the margins
    record how much of the boundary region is suspect because a construction
    consumed neighbouring degrees.
    """

    def __init__(self, p_max: int, n_max: int, p_margin: int = 0, n_margin: int = 0):
        self.p_max = p_max
        self.n_max = n_max
        self.p_margin = p_margin
        self.n_margin = n_margin

    def shrink(self, dp: int = 0, dn: int = 0) -> "SpectralWindow":
        return SpectralWindow(self.p_max, self.n_max, self.p_margin + dp, self.n_margin + dn)

    def contains_cell(self, p: int, n: int) -> bool:
        return 0 <= p <= self.p_max - self.p_margin and 0 <= n <= self.n_max - self.n_margin

    def assert_entry(self, s: int, t: int, r: int = 1) -> None:
        """Refuse page entries whose computation leaves the stored region."""
        if s < 0 or t < 0:
            raise WindowError(f"bidegree (-{s},{t}) outside the second quadrant")
        if s + r > self.p_max - self.p_margin or t + 1 > self.n_max - self.n_margin:
            raise WindowError(
                f"entry (-{s},{t}) at page {r} not certified by window "
                f"(p_max={self.p_max}-{self.p_margin}, n_max={self.n_max}-{self.n_margin})"
            )

    def as_dict(self) -> dict:
        return {
            "P": self.p_max,
            "Q": self.n_max,
            "p_margin": self.p_margin,
            "n_margin": self.n_margin,
        }

    def __repr__(self) -> str:
        return f"SpectralWindow(p<= {self.p_max}-{self.p_margin}, n<={self.n_max}-{self.n_margin})"


class WindowError(ValueError):
    pass


class Bicomplex:
    """Cells with two commuting differentials, plus optional operator hooks.

    `dv[(p, n)]` maps cell (p, n) to (p, n-1); `dh[(p, n)]` maps it to
    (p+1, n).  The hooks (`lift`, `project`, `coface`, `codegen`) expose the
    underlying cosimplicial object when present, for the maps that need to
    act on representatives.
    """

    def __init__(self, window: SpectralWindow, dims, dv, dh, hooks=None):
        self.window = window
        self.dims = dict(dims)
        self.dv = dv
        self.dh = dh
        self.hooks = hooks or {}

    @property
    def p_max(self) -> int:
        return self.window.p_max

    @property
    def n_max(self) -> int:
        return self.window.n_max

    def dim(self, p: int, n: int) -> int:
        return self.dims.get((p, n), 0)

    def vertical(self, p: int, n: int) -> BitMatrix:
        return self.dv.get((p, n)) or BitMatrix.zeros(self.dim(p, n - 1), self.dim(p, n))

    def horizontal(self, p: int, n: int) -> BitMatrix:
        return self.dh.get((p, n)) or BitMatrix.zeros(self.dim(p + 1, n), self.dim(p, n))

    def validate(self) -> None:
        for (p, n) in self.dims:
            if n - 2 >= 0 and self.dim(p, n):
                if not (self.vertical(p, n - 1) @ self.vertical(p, n)).is_zero():
                    raise ValueError(f"vertical differential fails to square to zero at {(p, n)}")
            if p + 2 <= self.p_max and self.dim(p, n):
                if not (self.horizontal(p + 1, n) @ self.horizontal(p, n)).is_zero():
                    raise ValueError(f"horizontal differential fails to square to zero at {(p, n)}")
            if n - 1 >= 0 and p + 1 <= self.p_max and self.dim(p, n):
                lhs = self.horizontal(p, n - 1) @ self.vertical(p, n)
                rhs = self.vertical(p + 1, n) @ self.horizontal(p, n)
                if lhs != rhs:
                    raise ValueError(f"differentials fail to commute at {(p, n)}")


class FilteredComplex:
    """Total complex of a bicomplex with the column filtration.

    Degree m collects the cells (p, m + p); coordinates are blocked by p in
    increasing order, so each filtration stage is a suffix of coordinates.
    """

    def __init__(self, bicomplex: Bicomplex, ell: Optional[int] = None):
        self.source = bicomplex
        self.p_top = bicomplex.p_max if ell is None else min(ell, bicomplex.p_max)
        self.window = bicomplex.window
        self.cells = {}
        self.offsets = {}
        self.dims = {}
        lo = -self.p_top
        hi = bicomplex.n_max
        self.lo = lo
        self.hi = hi
        for m in range(lo, hi + 1):
            cells = []
            offset = 0
            for p in range(0, self.p_top + 1):
                n = m + p
                d = bicomplex.dim(p, n)
                if 0 <= n <= bicomplex.n_max and d:
                    cells.append(p)
                    self.offsets[(m, p)] = offset
                    offset += d
            self.cells[m] = cells
            self.dims[m] = offset
        self.diff = {}
        for m in range(lo + 1, hi + 1):
            rows = [0] * self.dims.get(m - 1, 0)
            for p in self.cells[m]:
                n = m + p
                base = self.offsets[(m, p)]
                if (m - 1, p) in self.offsets:
                    tbase = self.offsets[(m - 1, p)]
                    for r, row in enumerate(bicomplex.vertical(p, n).rows):
                        rows[tbase + r] ^= row << base
                if p + 1 <= self.p_top and (m - 1, p + 1) in self.offsets:
                    tbase = self.offsets[(m - 1, p + 1)]
                    for r, row in enumerate(bicomplex.horizontal(p, n).rows):
                        rows[tbase + r] ^= row << base
            self.diff[m] = BitMatrix(self.dims.get(m - 1, 0), self.dims[m], rows)

    def dim(self, m: int) -> int:
        return self.dims.get(m, 0)

    def boundary(self, m: int) -> BitMatrix:
        return self.diff.get(m) or BitMatrix.zeros(self.dim(m - 1), self.dim(m))

    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.lo, self.hi, self.dims, self.diff)

    def filtration_mask(self, m: int, s: int) -> int:
        """Bitmask of F^{-s} in degree m: coordinates in columns p >= s."""
        full = (1 << self.dim(m)) - 1
        if s <= 0:
            return full
        below = 0
        for p in self.cells.get(m, []):
            if p < s:
                below = self.offsets[(m, p)] + self.source.dim(p, m + p)
        return full ^ ((1 << below) - 1)

    def column_split(self, m: int, vec: int):
        """Decompose a degree-m vector into per-column pieces (p, local)."""
        out = []
        for p in self.cells.get(m, []):
            base = self.offsets[(m, p)]
            d = self.source.dim(p, m + p)
            piece = (vec >> base) & ((1 << d) - 1)
            if piece:
                out.append((p, piece))
        return out

    def inject_cell(self, m: int, p: int, local: int) -> int:
        return local << self.offsets[(m, p)]

    def truncation_projection(self, ell: int):
        """The quotient discarding columns below -ell, with its projection."""
        quotient = FilteredComplex(self.source, ell)
        proj = {}
        for m in range(self.lo, self.hi + 1):
            entries = []
            for p in quotient.cells.get(m, []):
                src = self.offsets.get((m, p))
                if src is None:
                    continue
                tgt = quotient.offsets[(m, p)]
                for j in range(self.source.dim(p, m + p)):
                    entries.append((tgt + j, src + j))
            proj[m] = BitMatrix.from_entries(quotient.dim(m), self.dim(m), entries)
        return quotient, proj


def total(b: Bicomplex, ell: Optional[int] = None) -> FilteredComplex:
    """Product total complex (finite within truncation) with column filtration."""
    return FilteredComplex(b, ell)


# -- dense cosimplicial objects -------------------------------------------------


class CosimplicialChainComplex:
    """Finitely truncated cosimplicial chain complex with dense matrices."""

    def __init__(self, P, levels, coface, codegen, validate=False):
        self.P = P
        self.levels = list(levels)
        self.coface = coface  # (p, k) -> dict n -> matrix, level p-1 to p
        self.codegen = codegen  # (p, k) -> dict n -> matrix, level p+1 to p
        if validate:
            self.validate()

    def level(self, p: int) -> ChainComplex:
        return self.levels[p]

    def coface_mat(self, p: int, k: int, n: int) -> BitMatrix:
        tab = self.coface[(p, k)]
        return tab.get(n) or BitMatrix.zeros(self.levels[p].dim(n), self.levels[p - 1].dim(n))

    def codegen_mat(self, p: int, k: int, n: int) -> BitMatrix:
        tab = self.codegen[(p, k)]
        return tab.get(n) or BitMatrix.zeros(self.levels[p].dim(n), self.levels[p + 1].dim(n))

    def validate(self):
        lo = max(c.lo for c in self.levels)
        hi = min(c.hi for c in self.levels)
        for p in range(1, self.P + 1):
            for k in range(p + 1):
                for n in range(lo + 1, hi + 1):
                    lhs = self.levels[p].boundary(n) @ self.coface_mat(p, k, n)
                    rhs = self.coface_mat(p, k, n - 1) @ self.levels[p - 1].boundary(n)
                    if lhs != rhs:
                        raise ValueError(f"coface {k} at level {p} is not a chain map")
        for p in range(2, self.P + 1):
            for j in range(p + 1):
                for i in range(j):
                    for n in range(lo, hi + 1):
                        lhs = self.coface_mat(p, j, n) @ self.coface_mat(p - 1, i, n)
                        rhs = self.coface_mat(p, i, n) @ self.coface_mat(p - 1, j - 1, n)
                        if lhs != rhs:
                            raise ValueError("cosimplicial coface identity fails")
        for p in range(self.P - 1):
            for j in range(p + 1):
                for i in range(p + 2):
                    for n in range(lo, hi + 1):
                        got = self.codegen_mat(p, j, n) @ self.coface_mat(p + 1, i, n)
                        if i == j or i == j + 1:
                            expect = BitMatrix.identity(self.levels[p].dim(n))
                        elif i < j:
                            expect = self.coface_mat(p, i, n) @ self.codegen_mat(p - 1, j - 1, n) if p >= 1 else None
                        else:
                            expect = self.coface_mat(p, i - 1, n) @ self.codegen_mat(p - 1, j, n) if p >= 1 else None
                        if expect is not None and got != expect:
                            raise ValueError("cosimplicial mixed identity fails")


def conormalize(y: CosimplicialChainComplex, window: Optional[SpectralWindow] = None) -> Bicomplex:
    """Cokernel of the cofaces d^1..d^p in each cosimplicial degree.

    The induced horizontal differential is the class of d^0; entries are
    realized as quotient presentations so classes can be lifted back.
    """
    n_max = min(c.hi for c in y.levels)
    window = window or SpectralWindow(y.P, n_max)
    pres = {}
    dims = {}
    for p in range(y.P + 1):
        for n in range(n_max + 1):
            d = y.levels[p].dim(n)
            vectors = []
            for k in range(1, p + 1):
                vectors.extend(y.coface_mat(p, k, n).columns())
            pres[(p, n)] = QuotientPresentation.of_full(d, Subspace(d, vectors))
            dims[(p, n)] = pres[(p, n)].dim
    dv = {}
    dh = {}
    for p in range(y.P + 1):
        for n in range(n_max + 1):
            if n >= 1:
                dv[(p, n)] = induced_matrix(y.levels[p].boundary(n), pres[(p, n)], pres[(p, n - 1)])
            if p + 1 <= y.P:
                dh[(p, n)] = induced_matrix(y.coface_mat(p + 1, 0, n), pres[(p, n)], pres[(p + 1, n)])

    def lift(p, n, coords):
        return pres[(p, n)].from_coords(coords)

    def project(p, n, vec):
        return pres[(p, n)].coords(vec)

    def coface(p_from, k, n, vec):
        return y.coface_mat(p_from + 1, k, n).apply(vec)

    def codegen(p_from, k, n, vec):
        return y.codegen_mat(p_from - 1, k, n).apply(vec)

    hooks = {
        "lift": lift,
        "project": project,
        "coface": coface,
        "codegen": codegen,
        "presentations": pres,
        "source": y,
    }
    return Bicomplex(window, dims, dv, dh, hooks)


class CosimplicialSimplicialModule:
    """Dense cosimplicial simplicial module: one simplicial module per
    cosimplicial degree, with levelwise coface/codegeneracy matrices."""

    def __init__(self, P, levels, coface, codegen, validate=False):
        self.P = P
        self.levels = list(levels)
        self.coface = coface
        self.codegen = codegen
        if validate:
            self.validate()

    @property
    def Q(self) -> int:
        return min(m.Q for m in self.levels)

    def validate(self):
        Q = self.Q
        for p in range(1, self.P + 1):
            for k in range(p + 1):
                f = self.coface[(p, k)]
                for n in range(1, Q + 1):
                    for i in range(n + 1):
                        if f[n - 1] @ self.levels[p - 1].face(n, i) != self.levels[p].face(n, i) @ f[n]:
                            raise ValueError("coface is not a simplicial-module map")
        chains = self.to_chain_levels()
        chains.validate()

    def to_chain_levels(self) -> CosimplicialChainComplex:
        """Normalize each cosimplicial level and induce the operators."""
        normalized = [normalize(m) for m in self.levels]
        coface = {}
        codegen = {}
        for (p, k), f in self.coface.items():
            coface[(p, k)] = {
                n: induced_matrix(f[n], normalized[p - 1].presentations[n], normalized[p].presentations[n])
                for n in range(self.Q + 1)
            }
        for (p, k), f in self.codegen.items():
            codegen[(p, k)] = {
                n: induced_matrix(f[n], normalized[p + 1].presentations[n], normalized[p].presentations[n])
                for n in range(self.Q + 1)
            }
        return CosimplicialChainComplex(self.P, normalized, coface, codegen)


def constant_cosimplicial(m: SimplicialModule, P: int) -> CosimplicialSimplicialModule:
    ident = {n: BitMatrix.identity(m.dim(n)) for n in range(m.Q + 1)}
    coface = {(p, k): ident for p in range(1, P + 1) for k in range(p + 1)}
    codegen = {(p, k): ident for p in range(P) for k in range(p + 1)}
    return CosimplicialSimplicialModule(P, [m] * (P + 1), coface, codegen)


def csm_tensor(u: CosimplicialSimplicialModule, v: CosimplicialSimplicialModule) -> CosimplicialSimplicialModule:
    """Cosimplicial-degreewise, simplicial-levelwise tensor product."""
    if u.P != v.P:
        raise ValueError("cosimplicial truncation mismatch")
    levels = [sm_tensor(u.levels[p], v.levels[p]) for p in range(u.P + 1)]
    Q = min(u.Q, v.Q)
    coface = {}
    codegen = {}
    for p in range(1, u.P + 1):
        for k in range(p + 1):
            coface[(p, k)] = {
                n: u.coface[(p, k)][n].kron(v.coface[(p, k)][n]) for n in range(Q + 1)
            }
    for p in range(u.P):
        for k in range(p + 1):
            codegen[(p, k)] = {
                n: u.codegen[(p, k)][n].kron(v.codegen[(p, k)][n]) for n in range(Q + 1)
            }
    return CosimplicialSimplicialModule(u.P, levels, coface, codegen)


# -- tensor of bicomplexes and the cosimplicial Eilenberg-Zilber maps ------------


class BicomplexTensor:
    """Tensor of two bicomplexes, with block bookkeeping per cell."""

    def __init__(self, a: Bicomplex, b: Bicomplex):
        self.a = a
        self.b = b
        p_max = a.p_max + b.p_max
        n_max = a.n_max + b.n_max
        # a truncated factor leaves cells beyond its own exact region missing
        # whole blocks, so the certified region is the min of the factors'
        p_exact = min(a.p_max - a.window.p_margin, b.p_max - b.window.p_margin)
        n_exact = min(a.n_max - a.window.n_margin, b.n_max - b.window.n_margin)
        self.window = SpectralWindow(p_max, n_max, p_max - p_exact, n_max - n_exact)
        dims = {}
        self.blocks = {}
        for p in range(p_max + 1):
            for n in range(n_max + 1):
                total_dim = 0
                blocks = []
                for p1 in range(0, min(p, a.p_max) + 1):
                    p2 = p - p1
                    if p2 > b.p_max:
                        continue
                    for n1 in range(0, min(n, a.n_max) + 1):
                        n2 = n - n1
                        if n2 > b.n_max:
                            continue
                        d = a.dim(p1, n1) * b.dim(p2, n2)
                        if d:
                            blocks.append((p1, n1, total_dim))
                            total_dim += d
                if total_dim:
                    dims[(p, n)] = total_dim
                    self.blocks[(p, n)] = blocks
        dv = {}
        dh = {}
        for (p, n), blocks in self.blocks.items():
            entries_v = []
            entries_h = []
            for (p1, n1, base) in blocks:
                p2, n2 = p - p1, n - n1
                da = a.dim(p1, n1)
                db = b.dim(p2, n2)
                # vertical: da (x) 1 + 1 (x) db
                if n - 1 >= 0:
                    tgt_blocks = {(q1, m1): off for (q1, m1, off) in self.blocks.get((p, n - 1), [])}
                    va = a.vertical(p1, n1)
                    if n1 - 1 >= 0 and (p1, n1 - 1) in tgt_blocks:
                        toff = tgt_blocks[(p1, n1 - 1)]
                        for i in range(da):
                            col = va.column(i)
                            for j in range(db):
                                src = base + i * db + j
                                cv = col
                                while cv:
                                    low = cv & -cv
                                    entries_v.append((toff + (low.bit_length() - 1) * db + j, src))
                                    cv ^= low
                    vb = b.vertical(p2, n2)
                    if n2 - 1 >= 0 and (p1, n1) in tgt_blocks:
                        toff = tgt_blocks[(p1, n1)]
                        db2 = b.dim(p2, n2 - 1)
                        for j in range(db):
                            col = vb.column(j)
                            for i in range(da):
                                src = base + i * db + j
                                cv = col
                                while cv:
                                    low = cv & -cv
                                    entries_v.append((toff + i * db2 + (low.bit_length() - 1), src))
                                    cv ^= low
                # horizontal likewise
                if p + 1 <= p_max:
                    tgt_blocks = {(q1, m1): off for (q1, m1, off) in self.blocks.get((p + 1, n), [])}
                    ha = a.horizontal(p1, n1)
                    if p1 + 1 <= a.p_max and (p1 + 1, n1) in tgt_blocks:
                        toff = tgt_blocks[(p1 + 1, n1)]
                        for i in range(da):
                            col = ha.column(i)
                            for j in range(db):
                                src = base + i * db + j
                                cv = col
                                while cv:
                                    low = cv & -cv
                                    entries_h.append((toff + (low.bit_length() - 1) * db + j, src))
                                    cv ^= low
                    hb = b.horizontal(p2, n2)
                    if p2 + 1 <= b.p_max and (p1, n1) in tgt_blocks:
                        toff = tgt_blocks[(p1, n1)]
                        for j in range(db):
                            col = hb.column(j)
                            for i in range(da):
                                src = base + i * db + j
                                cv = col
                                while cv:
                                    low = cv & -cv
                                    entries_h.append((toff + i * db + (low.bit_length() - 1), src))
                                    cv ^= low
            if n - 1 >= 0:
                dv[(p, n)] = BitMatrix.from_entries(dims.get((p, n - 1), 0), dims[(p, n)], entries_v)
            if p + 1 <= p_max:
                dh[(p, n)] = BitMatrix.from_entries(dims.get((p + 1, n), 0), dims[(p, n)], entries_h)
        self.bicomplex = Bicomplex(self.window, dims, dv, dh)

    def block_offset(self, p: int, n: int, p1: int, n1: int) -> Optional[int]:
        for (q1, m1, off) in self.blocks.get((p, n), []):
            if (q1, m1) == (p1, n1):
                return off
        return None

    def total_pairing(self, fa: "FilteredComplex", fb: "FilteredComplex",
                      ft: "FilteredComplex", ma: int, a_chain: int, mb: int, b_chain: int) -> int:
        """Image of a degree-ma chain paired with a degree-mb chain inside the
        degree-(ma+mb) total chains of the tensor."""
        out = 0
        for (pa, la) in fa.column_split(ma, a_chain):
            na = ma + pa
            for (pb, lb) in fb.column_split(mb, b_chain):
                nb = mb + pb
                p, n = pa + pb, na + nb
                if (ma + mb, p) not in ft.offsets:
                    continue
                cell = self.inject(p, n, pa, na, la, lb)
                out ^= ft.inject_cell(ma + mb, p, cell)
        return out

    def inject(self, p, n, p1, n1, vec_a: int, vec_b: int) -> int:
        """Coordinates of (a-part) (x) (b-part) inside cell (p, n)."""
        off = self.block_offset(p, n, p1, n1)
        if off is None:
            raise ValueError("empty block")
        p2, n2 = p - p1, n - n1
        db = self.b.dim(p2, n2)
        out = 0
        ra = vec_a
        while ra:
            la = ra & -ra
            i = la.bit_length() - 1
            ra ^= la
            rb = vec_b
            while rb:
                lb = rb & -rb
                out ^= 1 << (off + i * db + (lb.bit_length() - 1))
                rb ^= lb
        return out


def caw_cosimplicial(bt: BicomplexTensor, target: Bicomplex) -> dict:
    """Cosimplicial Alexander-Whitney map, from the tensor of conormalized
    bicomplexes into the conormalization of the tensor.

    On the block at bidegrees (p1, n1) (x) (p2, n2) inside cell (p, n), the
    first factor climbs by the back cofaces and the second by the front
    ones; both bicomplexes act through their operator hooks.
    """
    a, b = bt.a, bt.b
    inject = target.hooks["inject_pair"]
    project = target.hooks["project"]
    maps = {}
    for (p, n), blocks in bt.blocks.items():
        if p > target.p_max or p > min(a.p_max, b.p_max):
            continue
        cols = [0] * bt.bicomplex.dim(p, n)
        for (p1, n1, base) in blocks:
            p2, n2 = p - p1, n - n1
            da = a.dim(p1, n1)
            db = b.dim(p2, n2)
            for i in range(da):
                ea = a.hooks["lift"](p1, n1, 1 << i)
                lv = p1
                for k in range(p1 + 1, p + 1):
                    ea = a.hooks["coface"](lv, k, n1, ea)
                    lv += 1
                for j in range(db):
                    eb = b.hooks["lift"](p2, n2, 1 << j)
                    lv = p2
                    for k in range(0, p1):
                        eb = b.hooks["coface"](lv, k, n2, eb)
                        lv += 1
                    elem = inject(p, n, n1, ea, eb)
                    cols[base + i * db + j] = project(p, n, elem)
        maps[(p, n)] = BitMatrix.from_columns(target.dim(p, n), cols)
    return maps


def cshuffle_cosimplicial(source: Bicomplex, bt: BicomplexTensor) -> dict:
    """Cosimplicial shuffle map, from the conormalization of a tensor into
    the tensor of conormalizations, given by codegeneracy words over all
    splittings."""
    from .delta import enumerate_shuffles

    a, b = bt.a, bt.b
    decompose = source.hooks["decompose_pair"]
    maps = {}
    for (p, n), dim in source.dims.items():
        cols = []
        for idx in range(dim):
            acc = 0
            for (n1, ea, eb) in decompose(p, n, source.hooks["lift"](p, n, 1 << idx)):
                n2 = n - n1
                for p1 in range(p + 1):
                    p2 = p - p1
                    if a.dim(p1, n1) == 0 or b.dim(p2, n2) == 0:
                        continue
                    for tau in enumerate_shuffles(p1, p2):
                        ya = ea
                        lv = p
                        for c in range(p1 + p2 - 1, p1 - 1, -1):
                            ya = a.hooks["codegen"](lv, tau(c), n1, ya)
                            lv -= 1
                        yb = eb
                        lv = p
                        for c in range(p1 - 1, -1, -1):
                            yb = b.hooks["codegen"](lv, tau(c), n2, yb)
                            lv -= 1
                        ca = a.hooks["project"](p1, n1, ya)
                        cb = b.hooks["project"](p2, n2, yb)
                        if ca and cb:
                            acc ^= bt.inject(p, n, p1, n1, ca, cb)
            cols.append(acc)
        maps[(p, n)] = BitMatrix.from_columns(bt.bicomplex.dim(p, n), cols)
    return maps
