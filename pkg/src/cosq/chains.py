"""Chain complexes over GF(2), the two-generator-per-degree complex W, and
the chain-level external squaring operation."""

from __future__ import annotations

from typing import Optional

from .gf2 import BitMatrix, QuotientPresentation, image_basis, kernel_basis


class ChainComplex:
    """A nonnegatively graded chain complex with explicit differentials.

    `dims[n]` is the dimension in degree n for lo <= n <= hi, and `diff[n]`
    maps degree n to degree n-1 (degrees below lo are treated as zero).
    """

    __slots__ = ("lo", "hi", "dims", "diff", "labels", "presentations")

    def __init__(self, lo, hi, dims, diff, labels=None, presentations=None):
        self.lo = lo
        self.hi = hi
        self.dims = dict(dims)
        self.diff = dict(diff)
        self.labels = labels
        self.presentations = presentations
        for n in range(lo, hi + 1):
            if n not in self.dims:
                self.dims[n] = 0
        for n in range(lo + 1, hi + 1):
            if n not in self.diff:
                self.diff[n] = BitMatrix.zeros(self.dim(n - 1), self.dim(n))

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def boundary(self, n: int) -> BitMatrix:
        """The differential C_n -> C_{n-1} (zero outside the stored range)."""
        if n in self.diff:
            return self.diff[n]
        return BitMatrix.zeros(self.dim(n - 1), self.dim(n))

    def validate(self) -> None:
        for n in range(self.lo + 2, self.hi + 1):
            if not self.boundary(n - 1).mul(self.boundary(n)).is_zero():
                raise ValueError(f"differential does not square to zero at degree {n}")

    def total_dim(self) -> int:
        return sum(self.dims.values())


def homology(c: ChainComplex, n: int) -> QuotientPresentation:
    """H_n = ker d_n / im d_{n+1} with canonical representatives."""
    if not (c.lo <= n <= c.hi):
        raise ValueError(f"degree {n} outside the valid range [{c.lo}, {c.hi}]")
    if n + 1 > c.hi:
        raise ValueError(f"degree {n} needs degree {n + 1}, outside the valid range")
    cycles = kernel_basis(c.boundary(n))
    boundaries = image_basis(c.boundary(n + 1))
    return QuotientPresentation(cycles, boundaries)


def homology_dims(c: ChainComplex, degrees) -> dict:
    return {n: homology(c, n).dim for n in degrees}


def cc_tensor(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Graded tensor product; signs vanish mod 2.

    Degree-n basis is ordered by blocks (i, n-i) with i ascending and
    row-major (c-index major) inside each block.
    """
    lo = c.lo + d.lo
    hi = c.hi + d.hi
    dims = {}
    offsets = {}
    for n in range(lo, hi + 1):
        total = 0
        for i in range(c.lo, c.hi + 1):
            j = n - i
            if d.lo <= j <= d.hi:
                offsets[(n, i)] = total
                total += c.dim(i) * d.dim(j)
        dims[n] = total
    diff = {}
    for n in range(lo + 1, hi + 1):
        entries = []
        for i in range(c.lo, c.hi + 1):
            j = n - i
            if not (d.lo <= j <= d.hi) or (n, i) not in offsets:
                continue
            base = offsets[(n, i)]
            dc_cols = c.boundary(i).columns()
            dd_cols = d.boundary(j).columns()
            for a in range(c.dim(i)):
                for b in range(d.dim(j)):
                    col = base + a * d.dim(j) + b
                    if i - 1 >= c.lo and (n - 1, i - 1) in offsets:
                        tbase = offsets[(n - 1, i - 1)]
                        col_vec = dc_cols[a]
                        for a2 in range(c.dim(i - 1)):
                            if (col_vec >> a2) & 1:
                                entries.append((tbase + a2 * d.dim(j) + b, col))
                    if j - 1 >= d.lo and (n - 1, i) in offsets:
                        tbase = offsets[(n - 1, i)]
                        col_vec = dd_cols[b]
                        for b2 in range(d.dim(j - 1)):
                            if (col_vec >> b2) & 1:
                                entries.append((tbase + a * d.dim(j - 1) + b2, col))
        diff[n] = BitMatrix.from_entries(dims.get(n - 1, 0), dims[n], entries)
    return ChainComplex(lo, hi, dims, diff)


def tensor_index(c: ChainComplex, d: ChainComplex, n: int, i: int, a: int, b: int) -> int:
    """Index of c_a (x) d_b inside (c (x) d)_n, with a in degree i."""
    offset = 0
    for ii in range(c.lo, i):
        j = n - ii
        if d.lo <= j <= d.hi:
            offset += c.dim(ii) * d.dim(j)
    return offset + a * d.dim(n - i) + b


def chain_map_ok(f: dict, src: ChainComplex, tgt: ChainComplex, degrees) -> bool:
    """Check d o f = f o d for a degreewise map f[n]: src_n -> tgt_n."""
    for n in degrees:
        if n - 1 < max(src.lo, tgt.lo):
            continue
        lhs = tgt.boundary(n).mul(f[n])
        rhs = f[n - 1].mul(src.boundary(n))
        if lhs != rhs:
            return False
    return True


class WComplex:
    """The standard free-involution resolution complex.

    Degree i has basis (e_i, sigma e_i) with differential carrying both onto
    e_{i-1} + sigma e_{i-1}; degrees below zero vanish.  Index 0 is e_i and
    index 1 is sigma e_i.
    """

    def __init__(self, top: int):
        self.top = top
        dims = {n: 2 for n in range(top + 1)}
        diff = {
            n: BitMatrix.from_dense([[1, 1], [1, 1]]) for n in range(1, top + 1)
        }
        self.complex = ChainComplex(0, top, dims, diff)

    def involution(self, n: int) -> BitMatrix:
        return BitMatrix.from_dense([[0, 1], [1, 0]])


def w_complex(top: int) -> ChainComplex:
    return WComplex(top).complex


def w_bar(top: int) -> ChainComplex:
    """W tensored down by the involution: one generator per degree, zero
    differential; this is also the homology of the classifying space."""
    dims = {n: 1 for n in range(top + 1)}
    diff = {n: BitMatrix.zeros(1, 1) for n in range(1, top + 1)}
    return ChainComplex(0, top, dims, diff)


class PiChainComplex:
    """A chain complex with an involution commuting with the differential."""

    def __init__(self, complex: ChainComplex, involution: dict):
        self.complex = complex
        self.involution = involution
        for n in range(complex.lo, complex.hi + 1):
            sig = involution[n]
            if sig.mul(sig) != BitMatrix.identity(complex.dim(n)):
                raise ValueError("involution does not square to the identity")
        for n in range(complex.lo + 1, complex.hi + 1):
            if complex.boundary(n).mul(involution[n]) != involution[n - 1].mul(complex.boundary(n)):
                raise ValueError("involution does not commute with the differential")


class OrbitTensorSquare:
    """The complex W tensor (C tensor C) modulo the diagonal involution.

    The involution acts freely on the W basis, so a basis of the quotient is
    e_i (x) c_a (x) c_b over all i, a, b; sigma e_i (x) a (x) b is identified
    with e_i (x) b (x) a.
    """

    def __init__(self, c: ChainComplex, w_top: int):
        self.base = c
        self.w_top = w_top
        lo = 2 * c.lo
        hi = w_top + 2 * c.hi
        self._index = {}
        self._basis = {n: [] for n in range(lo, hi + 1)}
        for n in range(lo, hi + 1):
            for i in range(0, min(w_top, n) + 1):
                rem = n - i
                for x in range(c.lo, c.hi + 1):
                    y = rem - x
                    if not (c.lo <= y <= c.hi):
                        continue
                    for a in range(c.dim(x)):
                        for b in range(c.dim(y)):
                            self._index[(n, i, x, a, b)] = len(self._basis[n])
                            self._basis[n].append((i, x, a, b))
        dims = {n: len(self._basis[n]) for n in range(lo, hi + 1)}
        diff = {}
        for n in range(lo + 1, hi + 1):
            entries = []
            for col, (i, x, a, b) in enumerate(self._basis[n]):
                y = n - i - x
                for r, v in self.boundary_of(n, i, x, a, b):
                    entries.append((r, col))
            diff[n] = BitMatrix.from_entries(dims.get(n - 1, 0), dims[n], entries)
        self.complex = ChainComplex(lo, hi, dims, diff)

    def index(self, n: int, i: int, x: int, a: int, b: int) -> int:
        """Position of e_i (x) c_a (x) c_b (a in degree x) inside degree n."""
        return self._index[(n, i, x, a, b)]

    def basis(self, n: int):
        return self._basis[n]

    def boundary_of(self, n: int, i, x, a, b):
        """Sparse boundary of a basis element, as (row, 1) pairs mod 2."""
        c = self.base
        y = n - i - x
        out = {}

        def hit(key):
            out[key] = out.get(key, 0) ^ 1

        if i >= 1:
            # (1 + sigma) e_{i-1}: the sigma term swaps the two factors
            hit((i - 1, x, a, b))
            hit((i - 1, y, b, a))
        dx = c.boundary(x)
        if x - 1 >= c.lo:
            col = dx.column(a)
            for a2 in range(c.dim(x - 1)):
                if (col >> a2) & 1:
                    hit((i, x - 1, a2, b))
        dy = c.boundary(y)
        if y - 1 >= c.lo:
            col = dy.column(b)
            for b2 in range(c.dim(y - 1)):
                if (col >> b2) & 1:
                    hit((i, x, a, b2))
        rows = []
        for (ii, xx, aa, bb), parity in out.items():
            if parity:
                rows.append((self._index[(n - 1, ii, xx, aa, bb)], 1))
        return rows

    def inject(self, n: int, i: int, x: int, vec_a: int, y: int, vec_b: int) -> int:
        """e_i (x) u (x) v for chains u (degree x) and v (degree y), bilinear."""
        out = 0
        for a in range(self.base.dim(x)):
            if not ((vec_a >> a) & 1):
                continue
            for b in range(self.base.dim(y)):
                if (vec_b >> b) & 1:
                    out ^= 1 << self._index[(n, i, x, a, b)]
        return out


def w_tensor_pi(c: ChainComplex, w_top: Optional[int] = None) -> OrbitTensorSquare:
    """W (x)_pi (C (x) C) for the swap-with-involution action."""
    if w_top is None:
        w_top = 2 * c.hi
    return OrbitTensorSquare(c, w_top)


def qm_external(orbit: OrbitTensorSquare, m: int, n: int, chain: int) -> int:
    """The external operation on a degree-n chain, valued in degree n + m.

    Sends c to e_{m-n} (x) c (x) c + e_{m-n+1} (x) c (x) dc; graded but not
    additive, so it is evaluated on whole chains rather than stored as a
    matrix.
    """
    c = orbit.base
    out = 0
    i = m - n
    if 0 <= i <= orbit.w_top:
        out ^= orbit.inject(n + m, i, n, chain, n, chain)
    i = m - n + 1
    if 0 <= i <= orbit.w_top and n - 1 >= c.lo:
        bd = c.boundary(n).apply(chain)
        if bd:
            out ^= orbit.inject(n + m, i, n, chain, n - 1, bd)
    return out


def qm_is_chain_level(orbit: OrbitTensorSquare, m: int, n: int, chain: int) -> bool:
    """Check the commutation q d = d q on a single chain."""
    c = orbit.base
    lhs = qm_external(orbit, m, n - 1, c.boundary(n).apply(chain)) if n - 1 >= c.lo else 0
    rhs = orbit.complex.boundary(n + m).apply(qm_external(orbit, m, n, chain)) if n + m - 1 >= orbit.complex.lo else 0
    return lhs == rhs


def induced_on_homology(f: dict, src: ChainComplex, tgt: ChainComplex, n: int) -> BitMatrix:
    """Matrix of the map a degreewise chain map induces on homology."""
    hs = homology(src, n)
    ht = homology(tgt, n)
    cols = [ht.coords(f[n].apply(rep)) for rep in hs.reps]
    return BitMatrix.from_columns(ht.dim, cols)


def orbit_square_map(src: OrbitTensorSquare, tgt: OrbitTensorSquare, f: dict) -> dict:
    """Functoriality of W (x)_pi (- (x) -): apply f on both tensor factors."""
    maps = {}
    lo, hi = src.complex.lo, src.complex.hi
    for n in range(lo, min(hi, tgt.complex.hi) + 1):
        cols = []
        for (i, x, a, b) in src.basis(n):
            y = n - i - x
            va = f[x].apply(1 << a)
            vb = f[y].apply(1 << b)
            cols.append(tgt.inject(n, i, x, va, y, vb))
        maps[n] = BitMatrix.from_columns(tgt.complex.dim(n), cols)
    return maps


def eq_shuffle_to_orbits(z_pair, w_top: Optional[int] = None):
    """Chain map from W (x)_pi (NM (x) NM) to N of the homotopy orbits.

    `z_pair` must come from `simplicial.pi_tensor_square`; the composite
    applies the shuffle map on the pair and then the involution-equivariant
    shuffle against the pinned alternating basis of the contractible free
    resolution.  Returns (orbit_source, target_normalized, map per degree).
    """
    from . import simplicial as s

    return s._eq_shuffle_to_orbits_impl(z_pair, w_top)
