"""Exact linear algebra over the two-element field.

Vectors are ints used as bitmasks (bit i = coordinate i).  Matrices store one
int per row, masking the columns.  Everything is immutable after construction
and deterministic: pivots are always the lowest available column.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence


def vector_from_bits(bits: Iterable[int]) -> int:
    v = 0
    for b in bits:
        v ^= 1 << b
    return v


def vector_bits(v: int) -> list[int]:
    out = []
    i = 0
    while v:
        if v & 1:
            out.append(i)
        v >>= 1
        i += 1
    return out


def dot(u: int, v: int) -> int:
    return (u & v).bit_count() & 1


class BitMatrix:
    """Dense bit-packed matrix over GF(2)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[Sequence[int]] = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = [0] * nrows
        else:
            if len(rows) != nrows:
                raise ValueError("row count mismatch")
            mask = (1 << ncols) - 1
            self.rows = [r & mask for r in rows]

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int]]) -> "BitMatrix":
        rows = [0] * nrows
        for r, c in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError("entry out of bounds")
            rows[r] ^= 1 << c
        return cls(nrows, ncols, rows)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]]) -> "BitMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        rows = []
        for row in data:
            acc = 0
            for j, x in enumerate(row):
                if x & 1:
                    acc |= 1 << j
            rows.append(acc)
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[int]) -> "BitMatrix":
        """Build from column vectors (each an int over nrows bits)."""
        rows = [0] * nrows
        for j, col in enumerate(cols):
            while col:
                low = col & -col
                rows[low.bit_length() - 1] |= 1 << j
                col ^= low
        return cls(nrows, len(cols), rows)

    # -- basic queries ---------------------------------------------------

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError("index out of bounds")
        return (self.rows[r] >> c) & 1

    def column(self, c: int) -> int:
        out = 0
        for r in range(self.nrows):
            if (self.rows[r] >> c) & 1:
                out |= 1 << r
        return out

    def columns(self) -> list[int]:
        return self.transpose().rows

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.rows)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def dense(self) -> list[list[int]]:
        return [[(row >> c) & 1 for c in range(self.ncols)] for row in self.rows]

    # -- arithmetic -------------------------------------------------------

    def apply(self, v: int) -> int:
        """Matrix-vector product over GF(2); v is a column vector over ncols."""
        out = 0
        for r, row in enumerate(self.rows):
            if (row & v).bit_count() & 1:
                out |= 1 << r
        return out

    def mul(self, other: "BitMatrix") -> "BitMatrix":
        """self @ other (composition: apply other first)."""
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        rows = []
        for row in self.rows:
            acc = 0
            rest = row
            while rest:
                low = rest & -rest
                acc ^= other.rows[low.bit_length() - 1]
                rest ^= low
            rows.append(acc)
        return BitMatrix(self.nrows, other.ncols, rows)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return self.mul(other)

    def add(self, other: "BitMatrix") -> "BitMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in matrix sum")
        return BitMatrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        return self.add(other)

    def transpose(self) -> "BitMatrix":
        rows = [0] * self.ncols
        for r, row in enumerate(self.rows):
            rest = row
            while rest:
                low = rest & -rest
                rows[low.bit_length() - 1] |= 1 << r
                rest ^= low
        return BitMatrix(self.ncols, self.nrows, rows)

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        """Vertical stack (same column space)."""
        if self.ncols != other.ncols:
            raise ValueError("column mismatch in stack")
        return BitMatrix(self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def kron(self, other: "BitMatrix") -> "BitMatrix":
        """Kronecker product; index (i, j) of the product is i * other_dim + j."""
        rows = []
        for ra in self.rows:
            for rb in other.rows:
                acc = 0
                rest = ra
                while rest:
                    low = rest & -rest
                    acc |= rb << ((low.bit_length() - 1) * other.ncols)
                    rest ^= low
                rows.append(acc)
        return BitMatrix(self.nrows * other.nrows, self.ncols * other.ncols, rows)


def _rref(rows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (pivot columns, reduced nonzero rows)."""
    pivots: list[int] = []
    basis: list[int] = []
    for row in rows:
        for p, b in zip(pivots, basis):
            if (row >> p) & 1:
                row ^= b
        if row == 0:
            continue
        p = (row & -row).bit_length() - 1
        for i, b in enumerate(basis):
            if (b >> p) & 1:
                basis[i] = b ^ row
        # insert keeping pivots sorted
        k = 0
        while k < len(pivots) and pivots[k] < p:
            k += 1
        pivots.insert(k, p)
        basis.insert(k, row)
    return pivots, basis


def rank(m: BitMatrix) -> int:
    """Rank over GF(2) via elimination."""
    return len(_rref(list(m.rows))[0])


class Subspace:
    """A subspace of GF(2)^n held as an echelon basis.

    Pivot columns are strictly increasing and each pivot occurs in exactly
    one basis vector, so coset reduction and membership are deterministic.
    """

    __slots__ = ("ambient_dim", "pivots", "basis")

    def __init__(self, ambient_dim: int, vectors: Iterable[int] = ()):
        self.ambient_dim = ambient_dim
        mask = (1 << ambient_dim) - 1
        pivots, basis = _rref([v & mask for v in vectors])
        self.pivots = tuple(pivots)
        self.basis = tuple(basis)

    @classmethod
    def from_echelon(cls, ambient_dim: int, pivots, basis) -> "Subspace":
        """Trusted constructor: pivots strictly increasing, each occurring
        in exactly its own basis vector.  Skips re-reduction."""
        out = cls.__new__(cls)
        out.ambient_dim = ambient_dim
        out.pivots = tuple(pivots)
        out.basis = tuple(basis)
        return out

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: int) -> int:
        """Canonical coset representative of v modulo this subspace."""
        for p, b in zip(self.pivots, self.basis):
            if (v >> p) & 1:
                v ^= b
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def coords(self, v: int) -> int:
        """Coordinates of v in the echelon basis; raises if v is outside."""
        out = 0
        for i, (p, b) in enumerate(zip(self.pivots, self.basis)):
            if (v >> p) & 1:
                v ^= b
                out |= 1 << i
        if v:
            raise ValueError("vector not in subspace")
        return out

    def from_coords(self, c: int) -> int:
        v = 0
        rest = c
        while rest:
            low = rest & -rest
            v ^= self.basis[low.bit_length() - 1]
            rest ^= low
        return v

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient mismatch")
        return Subspace(self.ambient_dim, list(self.basis) + list(other.basis))

    def basis_matrix(self) -> BitMatrix:
        """Matrix whose columns are the basis vectors (ambient_dim x dim)."""
        return BitMatrix.from_columns(self.ambient_dim, list(self.basis))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of GF(2)^{self.ambient_dim})"


def kernel_basis(m: BitMatrix) -> Subspace:
    """Echelon basis of the right kernel {x : m @ x = 0}.

    Each basis vector is pivoted on its own free column, so no further
    reduction is needed.
    """
    pivots, rows = _rref(list(m.rows))
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.ncols) if c not in pivot_set]
    vectors = []
    for f in free_cols:
        v = 1 << f
        for p, row in zip(pivots, rows):
            if (row >> f) & 1:
                v |= 1 << p
        vectors.append(v)
    return Subspace.from_echelon(m.ncols, free_cols, vectors)


def image_basis(m: BitMatrix) -> Subspace:
    """Column space of m as a subspace of GF(2)^nrows."""
    return Subspace(m.nrows, m.columns())


def solve(m: BitMatrix, b: int) -> Optional[int]:
    """Deterministic particular solution of m @ x = b, or None.

    Free variables are set to zero, so the solution depends only on (m, b).
    """
    pivots: list[int] = []
    basis: list[int] = []
    rhs: list[int] = []
    for r, row in enumerate(m.rows):
        cur = row
        val = (b >> r) & 1
        for p, bb, v in zip(pivots, basis, rhs):
            if (cur >> p) & 1:
                cur ^= bb
                val ^= v
        if cur == 0:
            if val:
                return None
            continue
        p = (cur & -cur).bit_length() - 1
        for i, bb in enumerate(basis):
            if (bb >> p) & 1:
                basis[i] = bb ^ cur
                rhs[i] ^= val
        k = 0
        while k < len(pivots) and pivots[k] < p:
            k += 1
        pivots.insert(k, p)
        basis.insert(k, cur)
        rhs.insert(k, val)
    x = 0
    # back-substitute with free variables zero; rows are fully reduced, so
    # each pivot's value is rhs minus contributions of other pivots (none
    # remain after full reduction except through free columns, which are 0).
    for p, v in zip(pivots, rhs):
        if v:
            x |= 1 << p
    # verify: reduction above is complete only when non-pivot entries of each
    # basis row involve free columns alone
    if m.apply(x) != b:
        return None
    return x


class LinearSystem:
    """A matrix prepared once for repeated solves against many right sides."""

    def __init__(self, m: BitMatrix):
        self.m = m
        self.pivots: list[int] = []
        self.basis: list[int] = []
        self.row_ops: list[int] = []  # combination of original rows per basis row
        for r, row in enumerate(m.rows):
            cur = row
            comb = 1 << r
            for p, b, c in zip(self.pivots, self.basis, self.row_ops):
                if (cur >> p) & 1:
                    cur ^= b
                    comb ^= c
            if cur == 0:
                continue
            p = (cur & -cur).bit_length() - 1
            for i, b in enumerate(self.basis):
                if (b >> p) & 1:
                    self.basis[i] = b ^ cur
                    self.row_ops[i] ^= comb
            k = 0
            while k < len(self.pivots) and self.pivots[k] < p:
                k += 1
            self.pivots.insert(k, p)
            self.basis.insert(k, cur)
            self.row_ops.insert(k, comb)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel_dim(self) -> int:
        return self.m.ncols - self.rank

    def solve(self, b: int) -> Optional[int]:
        x = 0
        for p, comb in zip(self.pivots, self.row_ops):
            if (comb & b).bit_count() & 1:
                x |= 1 << p
        return x if self.m.apply(x) == b else None


class QuotientPresentation:
    """A quotient ambient/modulus with canonical coset representatives.

    Representatives are obtained by reducing against the echelon basis of the
    modulus, so they depend only on the coset.  `reps` is an echelon basis of
    the space of representatives; quotient coordinates are read off its
    pivot columns.
    """

    __slots__ = ("ambient", "modulus", "reps", "_rep_space")

    def __init__(self, ambient: Subspace, modulus: Subspace):
        if ambient.ambient_dim != modulus.ambient_dim:
            raise ValueError("ambient mismatch")
        if not ambient.contains_subspace(modulus):
            raise ValueError("modulus not contained in ambient")
        self.ambient = ambient
        self.modulus = modulus
        reduced = [modulus.reduce(v) for v in ambient.basis]
        self._rep_space = Subspace(ambient.ambient_dim, reduced)
        self.reps = self._rep_space.basis

    @classmethod
    def of_full(cls, n: int, modulus: Subspace) -> "QuotientPresentation":
        return cls(Subspace.full(n), modulus)

    @property
    def dim(self) -> int:
        return len(self.reps)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.ambient_dim

    def reduce(self, v: int) -> int:
        """Canonical representative of the coset of v (fault if v outside)."""
        if not self.ambient.contains(v):
            raise ValueError("vector not in the ambient subspace")
        return self.modulus.reduce(v)

    def coords(self, v: int) -> int:
        """Quotient coordinates of the coset of v over the `reps` basis."""
        return self._rep_space.coords(self.reduce(v))

    def from_coords(self, c: int) -> int:
        return self._rep_space.from_coords(c)

    def __repr__(self) -> str:
        return f"QuotientPresentation(dim {self.dim})"


def quotient_reduce(q: QuotientPresentation, v: int) -> int:
    """Canonical coset representative of v in the presented quotient."""
    return q.reduce(v)


def induced_matrix(f: BitMatrix, source: QuotientPresentation, target: QuotientPresentation) -> BitMatrix:
    """Matrix of the map induced by f on quotient presentations.

    Checks well-definedness: f must carry the source modulus into the
    target modulus.
    """
    for b in source.modulus.basis:
        if target.reduce(f.apply(b)) != 0:
            raise ValueError("map does not descend to the quotient")
    cols = [target.coords(f.apply(rep)) for rep in source.reps]
    return BitMatrix.from_columns(target.dim, cols)
