"""Truncated simplicial sets and simplicial GF(2)-modules.

Spaces are finite and truncated at a simplicial degree; modules carry dense
face/degeneracy matrices.  The preset spaces (simplices, skeleta, the free
contractible involution space and its classifying space) and the standard
constructions (Kan suspension, cofiber, linearization, normalization, the
Eilenberg-Zilber maps, homotopy orbits) all live here.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Optional

from .chains import ChainComplex, w_tensor_pi
from .delta import enumerate_shuffles
from .gf2 import (
    BitMatrix,
    QuotientPresentation,
    Subspace,
    induced_matrix,
)

BASE = "*"


def monotone_tuples(n: int, p: int):
    """All weakly monotone (n+1)-tuples valued in 0..p, lexicographically."""
    for positions in combinations(range(n + p + 1), n + 1):
        yield tuple(positions[i] - i for i in range(n + 1))


class FiniteSimplicialSet:
    """A simplicial set truncated at degree Q, with explicit operator tables."""

    def __init__(self, Q, levels, faces, degens, basepoints=None, validate=True):
        self.Q = Q
        self.levels = [tuple(lv) for lv in levels]
        self.faces = faces
        self.degens = degens
        self.basepoints = basepoints
        self._index = [
            {x: i for i, x in enumerate(lv)} for lv in self.levels
        ]
        if validate:
            self.validate()

    @classmethod
    def build(cls, Q, levels, face_fn, degen_fn, basepoints=None, validate=True):
        faces = {}
        degens = {}
        for n in range(1, Q + 1):
            for i in range(n + 1):
                faces[(n, i)] = {x: face_fn(n, i, x) for x in levels[n]}
        for n in range(Q):
            for i in range(n + 1):
                degens[(n, i)] = {x: degen_fn(n, i, x) for x in levels[n]}
        return cls(Q, levels, faces, degens, basepoints, validate)

    # -- structure access --------------------------------------------------

    def size(self, n: int) -> int:
        return len(self.levels[n])

    def face(self, n: int, i: int, x):
        return self.faces[(n, i)][x]

    def degen(self, n: int, i: int, x):
        return self.degens[(n, i)][x]

    def basepoint(self, n: int):
        return None if self.basepoints is None else self.basepoints[n]

    @property
    def pointed(self) -> bool:
        return self.basepoints is not None

    def index(self, n: int, x) -> int:
        return self._index[n][x]

    # -- validation ---------------------------------------------------------

    def validate(self):
        for n in range(2, self.Q + 1):
            for x in self.levels[n]:
                for j in range(n + 1):
                    for i in range(j):
                        lhs = self.face(n - 1, i, self.face(n, j, x))
                        rhs = self.face(n - 1, j - 1, self.face(n, i, x))
                        if lhs != rhs:
                            raise ValueError(f"face identity fails at level {n}")
        for n in range(self.Q - 1):
            for x in self.levels[n]:
                for j in range(n + 1):
                    for i in range(j + 1):
                        lhs = self.degen(n + 1, j + 1, self.degen(n, i, x))
                        rhs = self.degen(n + 1, i, self.degen(n, j, x))
                        if lhs != rhs:
                            raise ValueError(f"degeneracy identity fails at level {n}")
        for n in range(self.Q):
            for x in self.levels[n]:
                for j in range(n + 1):
                    sx = self.degen(n, j, x)
                    for i in range(n + 2):
                        got = self.face(n + 1, i, sx)
                        if i == j or i == j + 1:
                            expect = x
                        elif i < j:
                            expect = self.degen(n - 1, j - 1, self.face(n, i, x)) if n else None
                        else:
                            expect = self.degen(n - 1, j, self.face(n, i - 1, x)) if n else None
                        if expect is not None and got != expect:
                            raise ValueError(f"mixed identity fails at level {n}")
        if self.pointed:
            for n in range(1, self.Q + 1):
                for i in range(n + 1):
                    if self.face(n, i, self.basepoint(n)) != self.basepoint(n - 1):
                        raise ValueError("basepoint not closed under faces")
            for n in range(self.Q):
                for i in range(n + 1):
                    if self.degen(n, i, self.basepoint(n)) != self.basepoint(n + 1):
                        raise ValueError("basepoint not closed under degeneracies")

    # -- degeneracy structure -----------------------------------------------

    def is_degenerate(self, n: int, x) -> bool:
        for i in range(n):
            y = self.face(n, i, x)
            if self.degen(n - 1, i, y) == x:
                return True
        return False

    def core_dim(self, n: int, x) -> int:
        while n > 0:
            for i in range(n):
                y = self.face(n, i, x)
                if self.degen(n - 1, i, y) == x:
                    x = y
                    n -= 1
                    break
            else:
                return n
        return 0

    def nondegenerate(self, n: int):
        if n == 0:
            return [x for x in self.levels[0]]
        return [x for x in self.levels[n] if not self.is_degenerate(n, x)]


# -- presets -----------------------------------------------------------------


def simplex(p: int, Q: int) -> FiniteSimplicialSet:
    """The standard p-simplex, truncated at level Q."""
    if p < 0 or Q < 0:
        raise ValueError("negative parameters")
    levels = [list(monotone_tuples(n, p)) for n in range(Q + 1)]
    face = lambda n, i, x: x[:i] + x[i + 1 :]
    degen = lambda n, i, x: x[: i + 1] + x[i:]
    return FiniteSimplicialSet.build(Q, levels, face, degen, validate=False)


def skeleton(x: FiniteSimplicialSet, ell: int) -> FiniteSimplicialSet:
    """Simplices whose nondegenerate core has dimension at most ell.

    ell = -1 is the empty space (basepoint only, when x is pointed).
    """
    keep = []
    for n in range(x.Q + 1):
        lv = []
        for s in x.levels[n]:
            if x.pointed and s == x.basepoint(n):
                lv.append(s)
            elif x.core_dim(n, s) <= ell:
                lv.append(s)
        keep.append(lv)
    faces = {k: {s: v for s, v in tab.items() if s in set(keep[k[0]])} for k, tab in x.faces.items()}
    degens = {k: {s: v for s, v in tab.items() if s in set(keep[k[0]])} for k, tab in x.degens.items()}
    return FiniteSimplicialSet(x.Q, keep, faces, degens, x.basepoints, validate=False)


def add_basepoint(x: FiniteSimplicialSet) -> FiniteSimplicialSet:
    """Adjoin a disjoint basepoint in every level."""
    if x.pointed:
        raise ValueError("space already pointed")
    levels = [[BASE] + list(lv) for lv in x.levels]

    def face(n, i, s):
        return BASE if s == BASE else x.face(n, i, s)

    def degen(n, i, s):
        return BASE if s == BASE else x.degen(n, i, s)

    return FiniteSimplicialSet.build(
        x.Q, levels, face, degen, basepoints=[BASE] * (x.Q + 1), validate=False
    )


def point(Q: int, pointed: bool = False) -> FiniteSimplicialSet:
    levels = [[()] for _ in range(Q + 1)]
    face = lambda n, i, s: ()
    degen = lambda n, i, s: ()
    bps = [()] * (Q + 1) if pointed else None
    return FiniteSimplicialSet.build(Q, levels, face, degen, basepoints=bps, validate=False)


def eilenberg_pi(Q: int) -> FiniteSimplicialSet:
    """The free contractible involution space: level q is all (q+1)-tuples
    over the two-element group, faces drop a coordinate, degeneracies repeat
    one."""
    levels = []
    for n in range(Q + 1):
        levels.append([tuple(w) for w in _bit_tuples(n + 1)])
    face = lambda n, i, w: w[:i] + w[i + 1 :]
    degen = lambda n, i, w: w[: i + 1] + w[i:]
    return FiniteSimplicialSet.build(Q, levels, face, degen, validate=False)


def classifying_pi(Q: int) -> FiniteSimplicialSet:
    """The bar-model classifying space of the two-element group."""
    levels = [[tuple(w) for w in _bit_tuples(n)] for n in range(Q + 1)]

    def face(n, i, w):
        if i == 0:
            return w[1:]
        if i == n:
            return w[:-1]
        return w[: i - 1] + (w[i - 1] ^ w[i],) + w[i + 1 :]

    def degen(n, i, w):
        return w[:i] + (0,) + w[i:]

    return FiniteSimplicialSet.build(Q, levels, face, degen, validate=False)


def _bit_tuples(k: int):
    if k == 0:
        yield ()
        return
    for v in range(1 << k):
        yield tuple((v >> j) & 1 for j in range(k))


def pi_translate(w):
    return tuple(1 ^ b for b in w)


def product(x: FiniteSimplicialSet, y: FiniteSimplicialSet) -> FiniteSimplicialSet:
    if x.Q != y.Q:
        raise ValueError("truncation mismatch")
    levels = [
        [(a, b) for a in x.levels[n] for b in y.levels[n]] for n in range(x.Q + 1)
    ]
    face = lambda n, i, s: (x.face(n, i, s[0]), y.face(n, i, s[1]))
    degen = lambda n, i, s: (x.degen(n, i, s[0]), y.degen(n, i, s[1]))
    return FiniteSimplicialSet.build(x.Q, levels, face, degen, validate=False)


def kan_suspension(x: FiniteSimplicialSet) -> FiniteSimplicialSet:
    """Kan suspension of a pointed space.

    Level n holds the basepoint plus one simplex (s, i) for every
    non-basepoint simplex s of x in each level i < n; the formulas come from
    the join with a point, collapsing the base and the cone line over the
    basepoint.
    """
    if not x.pointed:
        raise ValueError("Kan suspension needs a pointed space")
    if x.Q < 1:
        raise ValueError("truncation too small to suspend")
    Q = x.Q
    levels = [[BASE]]
    for n in range(1, Q + 1):
        lv = [BASE]
        for i in range(n):
            for s in x.levels[i]:
                if s != x.basepoint(i):
                    lv.append((s, i))
        levels.append(lv)

    def face(n, k, cell):
        if cell == BASE:
            return BASE
        s, i = cell
        if k <= i:
            if i == 0:
                return BASE
            y = x.face(i, k, s)
            return BASE if y == x.basepoint(i - 1) else (y, i - 1)
        if i == n - 1:
            return BASE  # k == n: the base of the cone is collapsed
        return (s, i)

    def degen(n, k, cell):
        if cell == BASE:
            return BASE
        s, i = cell
        if k <= i:
            return (x.degen(i, k, s), i + 1)
        return (s, i)

    return FiniteSimplicialSet.build(
        Q, levels, face, degen, basepoints=[BASE] * (Q + 1), validate=False
    )


def cofiber(x: FiniteSimplicialSet, member: Callable[[int, object], bool]) -> FiniteSimplicialSet:
    """Collapse the operator-closed subspace selected by `member` to the
    basepoint.  Faults if the subspace is not closed under the operators."""
    for n in range(1, x.Q + 1):
        for s in x.levels[n]:
            if member(n, s):
                for i in range(n + 1):
                    if not member(n - 1, x.face(n, i, s)):
                        raise ValueError("subspace not closed under faces")
    for n in range(x.Q):
        for s in x.levels[n]:
            if member(n, s):
                for i in range(n + 1):
                    if not member(n + 1, x.degen(n, i, s)):
                        raise ValueError("subspace not closed under degeneracies")
    if x.pointed:
        for n in range(x.Q + 1):
            if not member(n, x.basepoint(n)):
                raise ValueError("subspace must contain the basepoint")
    levels = [[BASE] + [s for s in x.levels[n] if not member(n, s)] for n in range(x.Q + 1)]

    def face(n, i, s):
        if s == BASE:
            return BASE
        y = x.face(n, i, s)
        return BASE if member(n - 1, y) else y

    def degen(n, i, s):
        if s == BASE:
            return BASE
        y = x.degen(n, i, s)
        return BASE if member(n + 1, y) else y

    return FiniteSimplicialSet.build(
        x.Q, levels, face, degen, basepoints=[BASE] * (x.Q + 1), validate=False
    )


def build_preset(kind: str, **params) -> FiniteSimplicialSet:
    """Named preset spaces; see the individual constructors."""
    Q = params["Q"]
    if Q < 0:
        raise ValueError("negative truncation")
    if kind == "delta":
        return simplex(params["p"], Q)
    if kind == "delta-pointed":
        return add_basepoint(simplex(params["p"], Q))
    if kind == "sk-delta-pointed":
        ell = params["ell"]
        if ell < -1:
            raise ValueError("skeleton level below -1")
        return skeleton(add_basepoint(simplex(params["p"], Q)), ell)
    if kind == "e-pi":
        return eilenberg_pi(Q)
    if kind == "b-pi":
        return classifying_pi(Q)
    if kind == "point":
        return point(Q, pointed=params.get("pointed", False))
    raise ValueError(f"unknown preset kind {kind!r}")


# -- simplicial modules -------------------------------------------------------


class SimplicialModule:
    """A truncated simplicial GF(2)-module with dense operator matrices."""

    def __init__(self, Q, dims, face, degen, labels=None):
        self.Q = Q
        self.dims = list(dims)
        self.face_mats = face
        self.degen_mats = degen
        self.labels = labels

    def dim(self, n: int) -> int:
        return self.dims[n]

    def face(self, n: int, i: int) -> BitMatrix:
        return self.face_mats[(n, i)]

    def degen(self, n: int, i: int) -> BitMatrix:
        return self.degen_mats[(n, i)]

    def validate(self):
        for n in range(2, self.Q + 1):
            for j in range(n + 1):
                for i in range(j):
                    if self.face(n - 1, i) @ self.face(n, j) != self.face(n - 1, j - 1) @ self.face(n, i):
                        raise ValueError(f"face identity fails at level {n}")
        for n in range(self.Q - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if self.degen(n + 1, j + 1) @ self.degen(n, i) != self.degen(n + 1, i) @ self.degen(n, j):
                        raise ValueError(f"degeneracy identity fails at level {n}")
        for n in range(self.Q):
            ident = BitMatrix.identity(self.dim(n))
            for j in range(n + 1):
                for i in range(n + 2):
                    got = self.face(n + 1, i) @ self.degen(n, j)
                    if i == j or i == j + 1:
                        expect = ident
                    elif i < j:
                        expect = self.degen(n - 1, j - 1) @ self.face(n, i) if n >= 1 else None
                    else:
                        expect = self.degen(n - 1, j) @ self.face(n, i - 1) if n >= 1 else None
                    if expect is not None and got != expect:
                        raise ValueError(f"mixed identity fails at level {n}")


def linearize(x: FiniteSimplicialSet) -> SimplicialModule:
    """Free module on the non-basepoint simplices; basepoint images go to 0."""
    basis = []
    index = []
    for n in range(x.Q + 1):
        lv = [s for s in x.levels[n] if not (x.pointed and s == x.basepoint(n))]
        basis.append(lv)
        index.append({s: i for i, s in enumerate(lv)})
    dims = [len(lv) for lv in basis]

    def op_matrix(n_src, n_tgt, fn):
        entries = []
        for col, s in enumerate(basis[n_src]):
            y = fn(s)
            if x.pointed and y == x.basepoint(n_tgt):
                continue
            entries.append((index[n_tgt][y], col))
        return BitMatrix.from_entries(dims[n_tgt], dims[n_src], entries)

    face = {}
    degen = {}
    for n in range(1, x.Q + 1):
        for i in range(n + 1):
            face[(n, i)] = op_matrix(n, n - 1, lambda s, n=n, i=i: x.face(n, i, s))
    for n in range(x.Q):
        for i in range(n + 1):
            degen[(n, i)] = op_matrix(n, n + 1, lambda s, n=n, i=i: x.degen(n, i, s))
    return SimplicialModule(x.Q, dims, face, degen, labels=basis)


def constant_module(Q: int, dim: int = 1) -> SimplicialModule:
    ident = BitMatrix.identity(dim)
    face = {(n, i): ident for n in range(1, Q + 1) for i in range(n + 1)}
    degen = {(n, i): ident for n in range(Q) for i in range(n + 1)}
    return SimplicialModule(Q, [dim] * (Q + 1), face, degen)


def sm_tensor(a: SimplicialModule, b: SimplicialModule) -> SimplicialModule:
    """Levelwise tensor product with diagonal operators."""
    if a.Q != b.Q:
        raise ValueError("truncation mismatch")
    dims = [a.dim(n) * b.dim(n) for n in range(a.Q + 1)]
    face = {
        (n, i): a.face(n, i).kron(b.face(n, i))
        for n in range(1, a.Q + 1)
        for i in range(n + 1)
    }
    degen = {
        (n, i): a.degen(n, i).kron(b.degen(n, i))
        for n in range(a.Q)
        for i in range(n + 1)
    }
    return SimplicialModule(a.Q, dims, face, degen)


def normalize(m: SimplicialModule) -> ChainComplex:
    """Quotient by degenerate chains, with the induced sum-of-faces
    differential; presentations are kept for lifting classes back."""
    pres = []
    for n in range(m.Q + 1):
        vectors = []
        if n >= 1:
            for i in range(n):
                vectors.extend(m.degen(n - 1, i).columns())
        pres.append(QuotientPresentation.of_full(m.dim(n), Subspace(m.dim(n), vectors)))
    diff = {}
    for n in range(1, m.Q + 1):
        total = BitMatrix.zeros(m.dim(n - 1), m.dim(n))
        for i in range(n + 1):
            total = total + m.face(n, i)
        diff[n] = induced_matrix(total, pres[n], pres[n - 1])
    dims = {n: pres[n].dim for n in range(m.Q + 1)}
    cc = ChainComplex(0, m.Q, dims, diff, presentations=pres)
    return cc


def normalized_class(cc: ChainComplex, n: int, level_vector: int) -> int:
    return cc.presentations[n].coords(level_vector)


def normalized_rep(cc: ChainComplex, n: int, coords: int) -> int:
    return cc.presentations[n].from_coords(coords)


def module_map_on_normalized(f: dict, src: SimplicialModule, tgt: SimplicialModule,
                             nsrc: ChainComplex, ntgt: ChainComplex) -> dict:
    """Induce a levelwise module map on normalized chains."""
    return {
        n: induced_matrix(f[n], nsrc.presentations[n], ntgt.presentations[n])
        for n in range(min(src.Q, tgt.Q) + 1)
    }


# -- Eilenberg-Zilber maps ----------------------------------------------------


def _face_word_apply(m: SimplicialModule, level: int, indices, vec: int) -> int:
    """Apply face operators right-to-left; indices paired with levels."""
    for idx in indices:
        vec = m.face(level, idx).apply(vec)
        level -= 1
    return vec


def aw_raw(a: SimplicialModule, b: SimplicialModule, n: int, p: int, ai: int, bi: int):
    """Front/back face pair of basis element ai (x) bi at level n, split at p."""
    va = 1 << ai
    vb = 1 << bi
    va = _face_word_apply(a, n, range(n, p, -1), va)
    vb = _face_word_apply(b, n, range(p - 1, -1, -1), vb)
    return va, vb


def aw_simplicial(a: SimplicialModule, b: SimplicialModule):
    """Alexander-Whitney map N(A (x) B) -> NA (x) NB.

    Returns (chain map dict, target complex, source complex, tensor module).
    """
    from .chains import cc_tensor, tensor_index

    t = sm_tensor(a, b)
    nt = normalize(t)
    na = normalize(a)
    nb = normalize(b)
    target = cc_tensor(na, nb)

    def aw_of_level_vector(n, vec):
        acc = 0
        rest = vec
        while rest:
            low = rest & -rest
            idx = low.bit_length() - 1
            rest ^= low
            ai, bi = divmod(idx, b.dim(n))
            for p in range(n + 1):
                va, vb = aw_raw(a, b, n, p, ai, bi)
                ca = na.presentations[p].coords(va)
                cb = nb.presentations[n - p].coords(vb)
                for x in range(na.dim(p)):
                    if not ((ca >> x) & 1):
                        continue
                    for y in range(nb.dim(n - p)):
                        if (cb >> y) & 1:
                            acc ^= 1 << tensor_index(na, nb, n, p, x, y)
        return acc

    maps = {}
    for n in range(t.Q + 1):
        cols = [aw_of_level_vector(n, rep) for rep in nt.presentations[n].reps]
        maps[n] = BitMatrix.from_columns(target.dim(n), cols)
        for v in nt.presentations[n].modulus.basis:
            if aw_of_level_vector(n, v):
                raise ValueError("Alexander-Whitney map not defined on normalization")
    return maps, target, nt, t


def shuffle_raw(a: SimplicialModule, b: SimplicialModule, p: int, q: int,
                va: int, vb: int) -> int:
    """Shuffle product of a level-p chain of A with a level-q chain of B,
    as a chain of (A (x) B) at level p + q."""
    out = 0
    for tau in enumerate_shuffles(p, q):
        ua = va
        level = p
        for c in range(p, p + q):
            ua = a.degen(level, tau(c)).apply(ua)
            level += 1
        ub = vb
        level = q
        for c in range(0, p):
            ub = b.degen(level, tau(c)).apply(ub)
            level += 1
        # tensor of level-(p+q) chains
        rest = ua
        while rest:
            low = rest & -rest
            ai = low.bit_length() - 1
            rest ^= low
            rb = ub
            while rb:
                lb = rb & -rb
                bi = lb.bit_length() - 1
                rb ^= lb
                out ^= 1 << (ai * b.dim(p + q) + bi)
    return out


def shuffle_simplicial(a: SimplicialModule, b: SimplicialModule):
    """Shuffle map NA (x) NB -> N(A (x) B); returns (maps, source, target, tensor)."""
    from .chains import cc_tensor

    t = sm_tensor(a, b)
    nt = normalize(t)
    na = normalize(a)
    nb = normalize(b)
    source = cc_tensor(na, nb)
    maps = {}
    for n in range(t.Q + 1):
        cols = []
        for p in range(na.lo, na.hi + 1):
            q = n - p
            if not (nb.lo <= q <= nb.hi):
                continue
            for x in range(na.dim(p)):
                va = na.presentations[p].reps[x]
                for y in range(nb.dim(q)):
                    vb = nb.presentations[q].reps[y]
                    raw = shuffle_raw(a, b, p, q, va, vb)
                    cols.append(nt.presentations[n].coords(raw))
        maps[n] = BitMatrix.from_columns(nt.dim(n), cols)
    return maps, source, nt, t


# -- involution modules and homotopy orbits ------------------------------------


class PiSimplicialModule:
    """A simplicial module with a levelwise involution commuting with the
    operators."""

    def __init__(self, module: SimplicialModule, involution, validate=True):
        self.module = module
        self.involution = involution
        if validate:
            for n in range(module.Q + 1):
                sig = involution[n]
                if sig @ sig != BitMatrix.identity(module.dim(n)):
                    raise ValueError("involution does not square to the identity")
            for n in range(1, module.Q + 1):
                for i in range(n + 1):
                    if module.face(n, i) @ involution[n] != involution[n - 1] @ module.face(n, i):
                        raise ValueError("involution does not commute with faces")
            for n in range(module.Q):
                for i in range(n + 1):
                    if module.degen(n, i) @ involution[n] != involution[n + 1] @ module.degen(n, i):
                        raise ValueError("involution does not commute with degeneracies")


def swap_matrix(da: int, db: int) -> BitMatrix:
    entries = [(b * da + a, a * db + b) for a in range(da) for b in range(db)]
    return BitMatrix.from_entries(da * db, da * db, entries)


class PairSquare(PiSimplicialModule):
    """M (x) M with the swap involution; remembers the factor."""

    def __init__(self, m: SimplicialModule):
        t = sm_tensor(m, m)
        swap = {n: swap_matrix(m.dim(n), m.dim(n)) for n in range(m.Q + 1)}
        super().__init__(t, swap, validate=False)
        self.factor = m


def pi_tensor_square(m: SimplicialModule) -> PairSquare:
    return PairSquare(m)


def k_eilenberg_pi(Q: int) -> PiSimplicialModule:
    """Linearized free involution space, with the translation involution."""
    space = eilenberg_pi(Q)
    mod = linearize(space)
    sig = {}
    for n in range(Q + 1):
        entries = []
        for col, w in enumerate(mod.labels[n]):
            entries.append((mod.labels[n].index(pi_translate(w)), col))
        sig[n] = BitMatrix.from_entries(mod.dim(n), mod.dim(n), entries)
    return PiSimplicialModule(mod, sig, validate=False)


def trivial_pi(m: SimplicialModule) -> PiSimplicialModule:
    return PiSimplicialModule(
        m, {n: BitMatrix.identity(m.dim(n)) for n in range(m.Q + 1)}, validate=False
    )


class HomotopyOrbits:
    """The coinvariants of (free space) (x) Z under the diagonal involution.

    Levelwise quotient by vectors v + (sigma v), realized through canonical
    presentations; `project` carries level vectors of the source tensor to
    quotient coordinates.
    """

    def __init__(self, z: PiSimplicialModule):
        Q = z.module.Q
        e = k_eilenberg_pi(Q)
        self.free = e
        self.coefficients = z
        big = sm_tensor(e.module, z.module)
        sigma = {n: e.involution[n].kron(z.involution[n]) for n in range(Q + 1)}
        self.source = PiSimplicialModule(big, sigma, validate=False)
        self.presentations = []
        for n in range(Q + 1):
            sig_cols = sigma[n].columns()
            vectors = [(1 << col) ^ sig_cols[col] for col in range(big.dim(n))]
            self.presentations.append(
                QuotientPresentation.of_full(big.dim(n), Subspace(big.dim(n), vectors))
            )
        dims = [p.dim for p in self.presentations]
        face = {}
        degen = {}
        for n in range(1, Q + 1):
            for i in range(n + 1):
                face[(n, i)] = induced_matrix(
                    big.face(n, i), self.presentations[n], self.presentations[n - 1]
                )
        for n in range(Q):
            for i in range(n + 1):
                degen[(n, i)] = induced_matrix(
                    big.degen(n, i), self.presentations[n], self.presentations[n + 1]
                )
        self.quotient = SimplicialModule(Q, dims, face, degen)

    def project(self, n: int, vec: int) -> int:
        return self.presentations[n].coords(vec)

    def inject_basis(self, n: int, e_index: int, z_vec: int) -> int:
        """Quotient coordinates of e_basis[e_index] (x) z_vec."""
        zdim = self.coefficients.module.dim(n)
        out = 0
        rest = z_vec
        while rest:
            low = rest & -rest
            zi = low.bit_length() - 1
            rest ^= low
            out ^= 1 << (e_index * zdim + zi)
        return self.project(n, out)


def homotopy_orbits(z: PiSimplicialModule) -> HomotopyOrbits:
    return HomotopyOrbits(z)


def xi(m: SimplicialModule):
    """The passage from M (x) M to the homotopy orbits of the swap.

    Returns (orbits, matrices) where matrices[n] sends (M (x) M)_n to the
    quotient coordinates of the class of (identity tuple) (x) z (x) z'.
    """
    pair = pi_tensor_square(m)
    orbits = homotopy_orbits(pair)
    mats = {}
    for n in range(m.Q + 1):
        e_space = orbits.free.module
        base_idx = e_space.labels[n].index(tuple([0] * (n + 1)))
        cols = []
        for idx in range(pair.module.dim(n)):
            cols.append(orbits.inject_basis(n, base_idx, 1 << idx))
        mats[n] = BitMatrix.from_columns(orbits.quotient.dim(n), cols)
    return orbits, mats


def w_basis_rep(Q: int):
    """Index of the pinned alternating tuples inside the linearized free
    involution space: degree n gives (index of e_n, index of sigma e_n)."""
    e = eilenberg_pi(Q)
    out = []
    for n in range(Q + 1):
        plain = tuple(i % 2 for i in range(n + 1))
        flipped = tuple(1 - i % 2 for i in range(n + 1))
        lv = [w for w in e.levels[n]]
        out.append((lv.index(plain), lv.index(flipped)))
    return out


def _eq_shuffle_to_orbits_impl(pair: PairSquare, w_top: Optional[int] = None):
    """Chain map W (x)_pi (NM (x) NM) -> N(orbits of M (x) M)."""
    m = pair.factor
    Q = m.Q
    nm = normalize(m)
    orbit_source = w_tensor_pi(nm, w_top if w_top is not None else Q)
    orbits = homotopy_orbits(pair)
    n_orbit = normalize(orbits.quotient)
    e_mod = orbits.free.module
    w_reps = w_basis_rep(Q)
    maps = {}
    for n in range(Q + 1):
        cols = []
        for (i, x, a, b) in orbit_source.basis(n):
            y = n - i - x
            rep_a = nm.presentations[x].reps[a]
            rep_b = nm.presentations[y].reps[b]
            inner = shuffle_raw(m, m, x, y, rep_a, rep_b)
            e_vec = 1 << w_reps[i][0]
            outer = shuffle_raw_vec(e_mod, pair.module, i, x + y, e_vec, inner)
            cols.append(n_orbit.presentations[n].coords(orbits.project(n, outer)))
        maps[n] = BitMatrix.from_columns(n_orbit.dim(n), cols)
    return orbit_source, n_orbit, maps, orbits


def shuffle_raw_vec(a: SimplicialModule, b: SimplicialModule, p: int, q: int,
                    va: int, vb: int) -> int:
    return shuffle_raw(a, b, p, q, va, vb)
