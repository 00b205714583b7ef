"""Spectral sequence of a filtered complex: cycles/boundaries, pages,
differentials, the stable page, abutment filtration and abutment map.

Page entries are presented on their leading column: the projection of the
cycle space to the (-s, t) cell modulo the projection of the boundaries,
which is isomorphic to the usual quotient because deeper-column cycles are
already boundaries there.  Representatives are genuine filtered chains,
recovered on demand by a prepared lift system; iterated homology of
(E^r, d^r) is kept as an independent cross-check.
"""

from __future__ import annotations

from typing import Optional

from .chains import homology
from .cosimplicial import FilteredComplex, WindowError
from .gf2 import (
    BitMatrix,
    LinearSystem,
    QuotientPresentation,
    Subspace,
    kernel_basis,
    rank,
    solve,
    vector_bits,
)


def image_on_kernel(g: BitMatrix, f: BitMatrix) -> Subspace:
    """The subspace f(ker g) of the target of f, without a kernel basis.

    A vector y is attainable iff it satisfies every left-kernel relation of
    the stacked matrix [g; f], which is computed by one elimination on the
    transpose.
    """
    if g.ncols != f.ncols:
        raise ValueError("domain mismatch")
    stacked = g.stack(f)
    left = kernel_basis(stacked.transpose())
    mu_rows = [v >> g.nrows for v in left.basis]
    return kernel_basis(BitMatrix(len(mu_rows), f.nrows, mu_rows))


def _column_offset(f: FilteredComplex, m: int, s: int) -> int:
    """Number of degree-m coordinates in columns strictly above -s."""
    off = 0
    for p in f.cells.get(m, []):
        if p < s:
            off = f.offsets[(m, p)] + f.source.dim(p, m + p)
    return off


def _suffix_boundary(f: FilteredComplex, m: int, s: int) -> tuple[BitMatrix, int]:
    """The boundary matrix restricted to the columns at depth >= s."""
    off = _column_offset(f, m, s)
    d = f.boundary(m)
    width = f.dim(m) - off
    rows = [(r >> off) & ((1 << width) - 1) for r in d.rows]
    return BitMatrix(d.nrows, width, rows), off


class PageEntry:
    """E^r at bidegree (-s, t), presented on the leading cell.

    `presentation` is pi(Z^r)/pi(B^r) in the coordinates of the cell
    (s, t-s+s) itself; `lift` recovers a full r-cycle with the prescribed
    leading part.
    """

    def __init__(self, f: FilteredComplex, r: int, s: int, t: int):
        self.f = f
        self.r = r
        self.s = s
        self.t = t
        m = t - s
        self.m = m
        self.cell_dim = f.source.dim(s, t) if (m, s) in f.offsets else 0
        z = _leading_cycles(f, r, s, t)
        b = _leading_boundaries(f, r, s, t)
        self.presentation = QuotientPresentation(z, b)
        self._lift_system = None

    @property
    def dim(self) -> int:
        return self.presentation.dim

    def class_of_chain(self, chain: int) -> int:
        """Coordinates of a chain of Z^r (given in full degree-m coordinates)."""
        off = _column_offset(self.f, self.m, self.s)
        if chain & ((1 << off) - 1):
            raise ValueError("chain not in the required filtration")
        leading = (chain >> off) & ((1 << self.cell_dim) - 1)
        return self.presentation.coords(leading)

    def lift(self, coords: int) -> int:
        """A full r-cycle representative with the given entry coordinates."""
        f, m, s, r = self.f, self.m, self.s, self.r
        leading = self.presentation.from_coords(coords)
        if self._lift_system is None:
            d_suffix, off = _suffix_boundary(f, m, s)
            forbidden = _column_offset(f, m - 1, s + r) if f.dim(m - 1) else 0
            rows = [row for row in d_suffix.rows[:forbidden]]
            head = [(1 << j) for j in range(self.cell_dim)]
            self._lift_system = (LinearSystem(BitMatrix(len(rows) + len(head), d_suffix.ncols,
                                                        rows + head)), off, len(rows))
        system, off, n_forbidden = self._lift_system
        rhs = 0
        for j in range(self.cell_dim):
            if (leading >> j) & 1:
                rhs |= 1 << (n_forbidden + j)
        x = system.solve(rhs)
        if x is None:
            raise WindowError("no lift for the requested entry class")
        return x << off

    def __repr__(self):
        return f"PageEntry(r={self.r}, (-{self.s},{self.t}), dim={self.dim})"


def _leading_cycles(f: FilteredComplex, r: int, s: int, t: int) -> Subspace:
    """pi(Z^r) on the (s, t) cell: leading parts of filtered chains whose
    boundary drops r more columns."""
    m = t - s
    cell_dim = f.source.dim(s, t) if (m, s) in f.offsets else 0
    if cell_dim == 0:
        return Subspace.zero(0)
    d_suffix, off = _suffix_boundary(f, m, s)
    forbidden = _column_offset(f, m - 1, s + r) if f.dim(m - 1) else 0
    g = BitMatrix(forbidden, d_suffix.ncols, d_suffix.rows[:forbidden])
    proj = BitMatrix(cell_dim, d_suffix.ncols, [1 << j for j in range(cell_dim)])
    return image_on_kernel(g, proj)


def _leading_boundaries(f: FilteredComplex, r: int, s: int, t: int) -> Subspace:
    """pi(B^r) on the (s, t) cell: the deeper r-cycles project away, so only
    boundaries of cycles one column up contribute."""
    m = t - s
    cell_dim = f.source.dim(s, t) if (m, s) in f.offsets else 0
    if cell_dim == 0:
        return Subspace.zero(0)
    s_up = s - r + 1
    if f.dim(m + 1) == 0:
        return Subspace.zero(cell_dim)
    d_suffix, off_up = _suffix_boundary(f, m + 1, s_up)
    # constraint: boundary lands in filtration depth s+1 ... except for the
    # leading cell itself, i.e. boundary components above depth s vanish
    target_off = _column_offset(f, m, s)
    g = BitMatrix(target_off, d_suffix.ncols, d_suffix.rows[:target_off])
    cell_rows = d_suffix.rows[target_off : target_off + cell_dim]
    proj = BitMatrix(cell_dim, d_suffix.ncols, cell_rows)
    return image_on_kernel(g, proj)


def page_entry(f: FilteredComplex, r: int, s: int, t: int, check_window: bool = True) -> PageEntry:
    if check_window:
        f.window.assert_entry(s, t, r)
    return PageEntry(f, r, s, t)


def cycles_boundaries(f: FilteredComplex, r: int, s: int, t: int):
    """Full-coordinate r-cycles and r-boundaries (for small complexes and
    cross-checks; pages themselves use the leading-column presentation)."""
    m = t - s
    z = _full_cycles(f, r, s, m)
    vectors = []
    z_up = _full_cycles(f, r - 1, s - r + 1, m + 1)
    d_up = f.boundary(m + 1)
    for b in z_up.basis:
        w = d_up.apply(b)
        if w:
            vectors.append(w)
    deeper = _full_cycles(f, r - 1, s + 1, m)
    vectors.extend(deeper.basis)
    return z, Subspace(f.dim(m), vectors)


def _full_cycles(f: FilteredComplex, r: int, s: int, m: int) -> Subspace:
    if f.dim(m) == 0:
        return Subspace.zero(f.dim(m))
    d_suffix, off = _suffix_boundary(f, m, s)
    forbidden = _column_offset(f, m - 1, s + r) if f.dim(m - 1) else 0
    g = BitMatrix(forbidden, d_suffix.ncols, d_suffix.rows[:forbidden])
    ker = kernel_basis(g)
    return Subspace(f.dim(m), [v << off for v in ker.basis])


def page_differential(f: FilteredComplex, src: PageEntry, tgt: PageEntry) -> BitMatrix:
    """d^r induced by the boundary, through lifts of the leading classes."""
    r = src.r
    if (tgt.s, tgt.t) != (src.s + r, src.t + r - 1):
        raise ValueError("target entry has the wrong bidegree")
    d = f.boundary(src.m)
    cols = []
    for j in range(src.dim):
        x = src.lift(1 << j)
        cols.append(tgt.class_of_chain(d.apply(x)))
    return BitMatrix.from_columns(tgt.dim, cols)


def page(f: FilteredComplex, r: int, region, check_window: bool = True):
    """Entries and differentials of the r-th page over the given bidegrees."""
    entries = {}
    for (s, t) in region:
        entries[(s, t)] = page_entry(f, r, s, t, check_window)
    diffs = {}
    for (s, t), src in entries.items():
        key = (s + r, t + r - 1)
        if key in entries:
            diffs[(s, t)] = page_differential(f, src, entries[key])
    return entries, diffs


def next_page_dims_from(entries, diffs):
    """dim H(E^r, d^r) per bidegree, the independent recomputation of E^{r+1}."""
    out = {}
    for (s, t), e in entries.items():
        r = e.r
        incoming = diffs.get((s - r, t - r + 1))
        outgoing = diffs.get((s, t))
        d = e.dim
        if outgoing is not None:
            d -= rank(outgoing)
        if incoming is not None:
            d -= rank(incoming)
        out[(s, t)] = d
    return out


def e_infinity_entry(f: FilteredComplex, s: int, t: int, check_window: bool = True) -> PageEntry:
    """The stable page within the window: r is pushed past the column span,
    so lifted representatives are honest cycles in filtration -s."""
    if check_window:
        f.window.assert_entry(s, t, r=1)
    r_max = max(f.p_top + 1 - s, 1)
    return PageEntry(f, r_max, s, t)


def homology_of_total(f: FilteredComplex, m: int) -> QuotientPresentation:
    return homology(f.chain_complex(), m)


def homology_dim_of_total(f: FilteredComplex, m: int) -> int:
    """dim H_m through ranks only; safe for large degrees."""
    d_m = f.boundary(m)
    d_up = f.boundary(m + 1)
    return f.dim(m) - rank(d_m) - rank(d_up)


def strong_convergence_check(f: FilteredComplex, m: int, s_range) -> bool:
    """Sum of stable-page dimensions along the antidiagonal equals the
    homology dimension of the total complex."""
    total_dim = 0
    for s in s_range:
        total_dim += e_infinity_entry(f, s, m + s, check_window=False).dim
    return total_dim == homology_dim_of_total(f, m)


def filtration_homology_dims(f: FilteredComplex, m: int, s_top: Optional[int] = None):
    """dim F^{-s} H_m(T) for s = 0..s_top, via ranks alone.

    F^{-s} is the kernel of the map to the homology of the column
    truncation; its dimension is dim H - rank(induced map), and the rank of
    the induced map is computed from attainable-image subspaces.
    """
    s_top = f.p_top + 1 if s_top is None else s_top
    h_dim = homology_dim_of_total(f, m)
    out = [h_dim]
    for s in range(1, s_top + 1):
        quotient, proj = f.truncation_projection(s - 1)
        # image of H(T) in H(T_{s-1}): project cycles, reduce mod boundaries
        pz = image_on_kernel(f.boundary(m), proj[m])
        qb = image_basis_of(quotient.boundary(m + 1))
        img_plus = pz.sum(qb)
        rank_induced = img_plus.dim - qb.dim
        out.append(h_dim - rank_induced)
    return out


def image_basis_of(m: BitMatrix) -> Subspace:
    return Subspace(m.nrows, m.columns())


def class_dies_in_truncation(f: FilteredComplex, m: int, chain: int, ell: int) -> bool:
    """Whether a cycle's class maps to zero in the homology of T_ell."""
    quotient, proj = f.truncation_projection(ell)
    image = proj[m].apply(chain)
    return solve(quotient.boundary(m + 1), image) is not None


def abutment_map_of_cycle(f: FilteredComplex, s: int, t: int, cycle: int,
                          entry: Optional[PageEntry] = None) -> int:
    """Carry a cycle representing a class of F^{-s} H_{t-s} to its stable
    entry.  Finds a homologous cycle supported in filtration -s (failure
    signals a window too small) and reads off the leading class."""
    m = t - s
    if f.boundary(m).apply(cycle):
        raise ValueError("chain is not a cycle")
    outside = ((1 << f.dim(m)) - 1) ^ f.filtration_mask(m, s)
    z = cycle
    if z & outside:
        d = f.boundary(m + 1)
        targets = vector_bits(outside)
        small = BitMatrix(len(targets), f.dim(m + 1), [d.rows[r] for r in targets])
        rhs = 0
        for j, r in enumerate(targets):
            if (z >> r) & 1:
                rhs |= 1 << j
        y = solve(small, rhs)
        if y is None:
            raise WindowError("no in-filtration representative found; window too small")
        z = z ^ d.apply(y)
    if entry is None:
        entry = e_infinity_entry(f, s, t, check_window=False)
    return entry.class_of_chain(z)


def abutment_filtration(f: FilteredComplex, m: int, s_top: Optional[int] = None):
    """F^{-s} H_m(T) = ker(H_m(T) -> H_m(T_{s-1})), for small complexes.

    Returns the homology presentation and the kernels as subspaces in its
    coordinates; for large complexes use `filtration_homology_dims`.
    """
    h = homology_of_total(f, m)
    s_top = f.p_top + 1 if s_top is None else s_top
    out = [Subspace.full(h.dim)]
    for s in range(1, s_top + 1):
        quotient, proj = f.truncation_projection(s - 1)
        qc = quotient.chain_complex()
        hq = homology(qc, m)
        cols = [hq.coords(proj[m].apply(rep)) for rep in h.reps]
        induced = BitMatrix.from_columns(hq.dim, cols)
        out.append(kernel_basis(induced))
    return h, out


def abutment_map(f: FilteredComplex, s: int, t: int, h_coords: int,
                 entry: Optional[PageEntry] = None) -> int:
    """Abutment of a homology class given in the coordinates of
    `homology_of_total`."""
    h = homology_of_total(f, t - s)
    return abutment_map_of_cycle(f, s, t, h.from_coords(h_coords), entry)


def induced_page_map(maps: dict, fsrc: FilteredComplex, ftgt: FilteredComplex,
                     src_entry: PageEntry, tgt_entry: PageEntry) -> BitMatrix:
    """Map induced on a page entry by a filtration-preserving chain map.

    `maps[m]` is the degree-m matrix on total complexes; lifts of the source
    classes are pushed through and read off in the target."""
    s = src_entry.s
    m = src_entry.m
    g = maps[m]
    cols = []
    for j in range(src_entry.dim):
        x = src_entry.lift(1 << j)
        img = g.apply(x)
        if img & (((1 << ftgt.dim(m)) - 1) ^ ftgt.filtration_mask(m, s)):
            raise ValueError("map does not preserve the filtration")
        cols.append(tgt_entry.class_of_chain(img))
    return BitMatrix.from_columns(tgt_entry.dim, cols)


def chain_map_on_totals(maps: dict, fsrc, ftgt, degrees) -> bool:
    for m in degrees:
        if ftgt.boundary(m) @ maps[m] != maps[m - 1] @ fsrc.boundary(m):
            return False
    return True
