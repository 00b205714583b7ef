"""Universal examples for stable-page classes, and the operations built on
them: representing maps, the stable-page external operations, the landing
column degree, and the coalgebra coactions."""

from __future__ import annotations

from functools import lru_cache

from .based import (
    BasedCosimplicialModule,
    ModuleChains,
    OrbitSquareChains,
    SpaceBased,
    conormalize_based,
    k_space_cosimplicial,
    orbit_square_cosimplicial,
)
from .cosimplicial import Bicomplex, total
from .delta import MonotoneMap
from .simplicial import (
    BASE,
    add_basepoint,
    cofiber,
    eilenberg_pi,
    kan_suspension,
    pi_translate,
    simplex,
)
from .specseq import page_entry


def v_degree(t: int, s: int, m: int) -> int:
    """Column depth reached by the degree-m operation out of (-s, t)."""
    if m < t - s:
        raise ValueError("operation undefined below the bottom degree")
    if m >= t:
        return s
    return t + s - m


def _collapsed(label, s: int) -> bool:
    return label != BASE and len(set(label)) <= s


def universal_space(p: int, s: int, t: int, Q: int):
    """The pointed space at cosimplicial degree p: iterated suspension of the
    simplex modulo its (s-1)-skeleton."""
    x = add_basepoint(simplex(p, Q))
    x = cofiber(x, lambda n, lab: lab == BASE or _collapsed(lab, s))
    for _ in range(t - s):
        x = kan_suspension(x)
    return x


def _map_label(depth: int, label, alpha: MonotoneMap, s: int):
    if label == BASE:
        return BASE
    if depth == 0:
        img = tuple(alpha.values[v] for v in label)
        return BASE if len(set(img)) <= s else img
    inner, i = label
    mapped = _map_label(depth - 1, inner, alpha, s)
    return BASE if mapped == BASE else (mapped, i)


class SpaceFamily:
    """A cosimplicial pointed space given by label-level operators, with its
    linearized structured module and conormalized-normalized bicomplex."""

    def __init__(self, spaces, coface_label, codegen_label):
        self.P = len(spaces) - 1
        self.Q = spaces[0].Q
        self.spaces = list(spaces)
        self.coface_label = coface_label
        self.codegen_label = codegen_label
        self.module = k_space_cosimplicial(self.spaces, coface_label, codegen_label)
        self.chains = ModuleChains(self.module)
        self.bicomplex = conormalize_based(self.chains, self.P, self.Q)
        self.filtered = total(self.bicomplex)
        self._dense = None

    def dense_levels(self):
        from .totalization import DenseLevels

        if self._dense is None:
            self._dense = DenseLevels(
                self.spaces, self.coface_label, self.codegen_label, self.bicomplex
            )
        return self._dense


def constant_family(space, P: int) -> SpaceFamily:
    """The constant cosimplicial family on one pointed space."""
    if not space.pointed:
        raise ValueError("constant families are taken over pointed spaces")
    ident = lambda p, k, n, label: label
    return SpaceFamily([space] * (P + 1), ident, ident)


class UniversalExample(SpaceFamily):
    """A universal example: the cosimplicial pointed space, its linearized
    structured module, the conormalized-normalized bicomplex, and the
    canonical stable-page generator."""

    def __init__(self, s: int, t: int, P: int, Q: int):
        if t < s or s < 0:
            raise ValueError("parameters must satisfy 0 <= s <= t")
        self.s = s
        self.t = t
        depth = t - s

        def coface_label(p, k, n, label):
            return _map_label(depth, label, MonotoneMap.coface(k, p), s)

        def codegen_label(p, k, n, label):
            return _map_label(depth, label, MonotoneMap.codegeneracy(k, p - 1), s)

        super().__init__(
            [universal_space(p, s, t, Q) for p in range(P + 1)],
            coface_label,
            codegen_label,
        )

    def generator_cycle(self) -> int:
        """The canonical infinite cycle: the sum of the one-dimensional cells
        along the total degree t-s antidiagonal."""
        m = self.t - self.s
        z = 0
        seen = False
        for p in self.filtered.cells.get(m, []):
            n = m + p
            dim = self.bicomplex.dim(p, n)
            if p >= self.s and dim:
                if dim != 1:
                    raise ValueError("antidiagonal cell is not one-dimensional")
                z |= self.filtered.inject_cell(m, p, 1)
                seen = True
        if not seen:
            raise ValueError("empty antidiagonal; window too small")
        if self.filtered.boundary(m).apply(z):
            raise ValueError("canonical chain is not a cycle")
        return z

    def first_page_is_single_class(self, region=None) -> bool:
        """The first page vanishes except for one class at (-s, t)."""
        if region is None:
            region = [
                (s1, t1)
                for s1 in range(self.P)
                for t1 in range(self.Q)
                if 0 <= t1 - s1
            ]
        for (s1, t1) in region:
            try:
                e = page_entry(self.filtered, 1, s1, t1)
            except Exception:
                continue
            expect = 1 if (s1, t1) == (self.s, self.t) else 0
            if e.dim != expect:
                return False
        return True


@lru_cache(maxsize=None)
def build_universal(s: int, t: int, P: int, Q: int) -> UniversalExample:
    return UniversalExample(s, t, P, Q)


def orbit_square_module(u: UniversalExample) -> BasedCosimplicialModule:
    """The big homotopy-orbit family over the universal example."""
    free = SpaceBased(eilenberg_pi(u.Q))
    return orbit_square_cosimplicial(u.module, free, pi_translate)


def orbit_square_bicomplex(u: UniversalExample, p_max=None, n_max=None) -> Bicomplex:
    chains = ModuleChains(orbit_square_module(u))
    return conormalize_based(chains, u.P if p_max is None else p_max,
                             u.Q if n_max is None else n_max)


def small_model_chains(u: UniversalExample, w_top=None) -> OrbitSquareChains:
    """The family p -> W (x)_pi (N (x) N) over the universal example."""
    return OrbitSquareChains(u.chains, u.Q if w_top is None else w_top)


def small_model_bicomplex(u: UniversalExample, p_max=None, n_max=None) -> Bicomplex:
    chains = small_model_chains(u)
    return conormalize_based(chains, u.P if p_max is None else p_max,
                             u.Q if n_max is None else n_max)


def fig1_expected_dim(s: int, t: int, s1: int, t1: int) -> int:
    """The stable-page pattern of the orbit square: one class on the column
    at depth s from height 2t up, one on the row at height 2t out to depth
    2s, zero elsewhere."""
    if s1 == s and t1 >= 2 * t:
        return 1
    if t1 == 2 * t and s <= s1 <= 2 * s:
        return 1
    return 0
