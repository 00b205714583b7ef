"""Structured simplicial modules for the large tensor and orbit objects.

A based module presents each level as a direct sum over degeneracy normal
forms: a basis key at level n is (repeats, core), where `repeats` is the
repeat set of a monotone surjection [n] ->> [m] and `core` is a basis
element new at level m.  Faces and degeneracies act sparsely through the
simplex-category calculus; the normalized chains have the cores as a
canonical basis, and conormalizing a cosimplicial family keeps the
combinatorial cores that are not coface images.  Nothing here is ever
materialized as a dense level.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Callable, Optional

from .cosimplicial import Bicomplex, SpectralWindow
from .delta import compose_repeats
from .gf2 import BitMatrix
from .simplicial import FiniteSimplicialSet


def values_from_repeats(n: int, repeats) -> tuple:
    rep = set(repeats)
    vals = []
    v = 0
    for i in range(n + 1):
        vals.append(v)
        if i not in rep:
            v += 1
    return tuple(vals)


def repeats_of_values(vals) -> tuple:
    return tuple(i for i in range(len(vals) - 1) if vals[i] == vals[i + 1])


def degen_repeats(n: int, j: int, repeats) -> tuple:
    """Repeat set of (epi with `repeats` on [n]) composed with the j-th
    codegeneracy, i.e. the key relabeling under s_j."""
    out = [i for i in repeats if i < j] + [j] + [i + 1 for i in repeats if i >= j]
    return tuple(sorted(out))


class BasedModule:
    """Abstract structured module; subclasses provide cores and their faces."""

    Q: int

    def cores(self, m: int):
        raise NotImplementedError

    def face_core(self, m: int, v: int, core):
        """d_v of a core, as a dict {key: 1} over level m-1 keys."""
        raise NotImplementedError

    # -- generic key calculus ------------------------------------------------

    def level_basis(self, n: int):
        """All keys (repeats, core) at level n, deterministically ordered."""
        from itertools import combinations

        out = []
        for k in range(n + 1):
            for rep in combinations(range(n), k):
                for c in self.cores(n - k):
                    out.append((rep, c))
        return out

    def dim(self, n: int) -> int:
        from math import comb

        return sum(comb(n, k) * len(self.cores(n - k)) for k in range(n + 1))

    def degen_key(self, n: int, j: int, key):
        rep, c = key
        return (degen_repeats(n, j, rep), c)

    def face_key(self, n: int, i: int, key):
        """d_i on a key, as a dict {key: 1} over level n-1 keys."""
        rep, c = key
        m = n - len(rep)
        vals = values_from_repeats(n, rep)
        w = vals[:i] + vals[i + 1 :]
        hit = set(w)
        if len(hit) == m + 1:
            return {(repeats_of_values(w), c): 1}
        missing = next(u for u in range(m + 1) if u not in hit)
        tilde = tuple(x if x < missing else x - 1 for x in w)
        tilde_rep = repeats_of_values(tilde)
        out = {}
        for (r2, c2), parity in self.face_core(m, missing, c).items():
            if not parity:
                continue
            combined = compose_repeats(tilde_rep, n - 1, r2)
            k2 = (combined, c2)
            out[k2] = out.get(k2, 0) ^ 1
        return {k: 1 for k, parity in out.items() if parity}

    def boundary_core(self, m: int, core):
        """Normalized differential of a core: sum of faces, cores only."""
        out = {}
        for v in range(m + 1):
            for (rep, c), parity in self.face_core(m, v, core).items():
                if parity and not rep:
                    out[c] = out.get(c, 0) ^ 1
        return [c for c, parity in out.items() if parity]


def xor_into(acc: dict, items) -> None:
    for k in items:
        acc[k] = acc.get(k, 0) ^ 1


class SpaceBased(BasedModule):
    """Structured module of a (possibly pointed) finite simplicial set."""

    def __init__(self, space: FiniteSimplicialSet):
        self.space = space
        self.Q = space.Q
        self._cores = []
        for n in range(space.Q + 1):
            lv = [
                s
                for s in space.nondegenerate(n)
                if not (space.pointed and s == space.basepoint(n))
            ]
            self._cores.append(tuple(lv))
        self._nf_cache = {}

    def cores(self, m: int):
        if m < 0 or m > self.Q:
            return ()
        return self._cores[m]

    def normal_form(self, n: int, label):
        """Eilenberg-Zilber normal form (repeats, core); None for basepoint."""
        if self.space.pointed and label == self.space.basepoint(n):
            return None
        key = (n, label)
        if key in self._nf_cache:
            return self._nf_cache[key]
        out = None
        for i in range(n):
            y = self.space.face(n, i, label)
            if self.space.degen(n - 1, i, y) == label:
                inner = self.normal_form(n - 1, y)
                if inner is None:
                    out = None
                else:
                    r2, c = inner
                    out = (compose_repeats((i,), n, r2), c)
                break
        else:
            out = ((), label)
        self._nf_cache[key] = out
        return out

    def face_core(self, m: int, v: int, core):
        y = self.space.face(m, v, core)
        nf = self.normal_form(m - 1, y)
        return {} if nf is None else {nf: 1}


class TensorBased(BasedModule):
    """Tensor product of based modules; cores are jointly nondegenerate
    tuples of factor keys."""

    def __init__(self, factors):
        self.factors = list(factors)
        self.Q = min(f.Q for f in self.factors)
        self._core_cache = {}

    def cores(self, m: int):
        if m < 0 or m > self.Q:
            return ()
        if m in self._core_cache:
            return self._core_cache[m]
        factor_bases = [f.level_basis(m) for f in self.factors]
        out = []
        for combo in iproduct(*factor_bases):
            common = set(combo[0][0])
            for key in combo[1:]:
                common &= set(key[0])
                if not common:
                    break
            if not common:
                out.append(tuple(combo))
        self._core_cache[m] = tuple(out)
        return self._core_cache[m]

    @staticmethod
    def quotient_key(key, common, level):
        rep, c = key
        common_sorted = sorted(common)

        def collapse(i):
            shift = 0
            for r in common_sorted:
                if r < i:
                    shift += 1
            return i - shift

        new_rep = tuple(sorted(collapse(i) for i in rep if i not in common))
        return (new_rep, c)

    def renormalize(self, level, combo):
        """Joint normal form of a tuple of factor keys -> (repeats, core)."""
        common = set(combo[0][0])
        for key in combo[1:]:
            common &= set(key[0])
        if not common:
            return ((), tuple(combo))
        com = tuple(sorted(common))
        inner = tuple(self.quotient_key(k, common, level) for k in combo)
        return (com, inner)

    def face_core(self, m: int, v: int, core):
        factor_results = [
            list(f.face_key(m, v, key).items()) for f, key in zip(self.factors, core)
        ]
        out = {}
        for combo in iproduct(*factor_results):
            keys = tuple(k for k, _ in combo)
            rep, inner = self.renormalize(m - 1, keys)
            k2 = (rep, inner)
            out[k2] = out.get(k2, 0) ^ 1
        return {k: 1 for k, parity in out.items() if parity}


class OrbitBased(BasedModule):
    """Quotient of a tensor module by a free core-permuting involution."""

    def __init__(self, tensor: TensorBased, involution: Callable):
        self.tensor = tensor
        self.Q = tensor.Q
        self.involution = involution
        self._reps = {}
        self._rep_of = {}

    def _prepare(self, m: int):
        if m in self._reps:
            return
        reps = []
        rep_of = {}
        for c in self.tensor.cores(m):
            if c in rep_of:
                continue
            partner = self.involution(m, c)
            if partner == c:
                raise ValueError("involution is not free on cores")
            rep_of[c] = c
            rep_of[partner] = c
            reps.append(c)
        self._reps[m] = tuple(reps)
        self._rep_of[m] = rep_of

    def cores(self, m: int):
        self._prepare(m)
        return self._reps[m]

    def rep_of(self, m: int, core):
        self._prepare(m)
        return self._rep_of[m][core]

    def face_core(self, m: int, v: int, core):
        out = {}
        for (rep, c), parity in self.tensor.face_core(m, v, core).items():
            if not parity:
                continue
            k2 = (rep, self.rep_of(m - 1 - len(rep), c))
            out[k2] = out.get(k2, 0) ^ 1
        return {k: 1 for k, parity in out.items() if parity}

    def project_key(self, n: int, key):
        rep, c = key
        return (rep, self.rep_of(n - len(rep), c))


# -- cosimplicial families ------------------------------------------------------


class BasedCosimplicialModule:
    """A cosimplicial family of based modules with core-level cofaces.

    Cofaces must send cores to cores injectively (this holds for everything
    built from injections of spaces); codegeneracies may be arbitrary sparse
    maps on keys.
    """

    def __init__(self, P: int, levels, coface_core, codegen_key):
        self.P = P
        self.levels = list(levels)
        self._coface_core = coface_core  # (p, k, m, core at p-1) -> core at p
        self._codegen_key = codegen_key  # (p, k, n, key at p) -> dict keys at p-1

    @property
    def Q(self) -> int:
        return min(f.Q for f in self.levels)

    def level(self, p: int) -> BasedModule:
        return self.levels[p]

    def coface_core(self, p: int, k: int, m: int, core):
        return self._coface_core(p, k, m, core)

    def coface_key(self, p: int, k: int, n: int, key):
        rep, c = key
        return (rep, self.coface_core(p, k, n - len(rep), c))

    def codegen_key(self, p: int, k: int, n: int, key):
        return self._codegen_key(p, k, n, key)


def k_space_cosimplicial(spaces, coface_label, codegen_label) -> BasedCosimplicialModule:
    """Linearized cosimplicial space from label-level operator functions.

    `coface_label(p, k, n, label)` gives the d^k-image in space p of a level-n
    label of space p-1; `codegen_label(p, k, n, label)` gives the s^k-image in
    space p-1 of a label of space p.
    """
    P = len(spaces) - 1
    levels = [SpaceBased(x) for x in spaces]

    def coface_core(p, k, m, core):
        img = coface_label(p, k, m, core)
        nf = levels[p].normal_form(m, img)
        if nf is None or nf[0]:
            raise ValueError("coface image of a core is not a core")
        return nf[1]

    def codegen_key(p, k, n, key):
        rep, c = key
        m = n - len(rep)
        img = codegen_label(p, k, m, c)
        nf = levels[p - 1].normal_form(m, img)
        if nf is None:
            return {}
        r2, c2 = nf
        # key is s_eta(c); the codegeneracy image is s_eta(s_eta2(c2))
        return {(compose_repeats(rep, n, r2), c2): 1}

    return BasedCosimplicialModule(P, levels, coface_core, codegen_key)


def orbit_square_cosimplicial(base: BasedCosimplicialModule, free_based: BasedModule,
                              flip_core: Callable) -> BasedCosimplicialModule:
    """The family p -> (free module) (x)_pi (V^p (x) V^p), with the free
    factor constant and the involution flipping it while swapping the two
    tensor factors."""
    P = base.P
    tensors = [
        TensorBased([free_based, base.level(p), base.level(p)]) for p in range(P + 1)
    ]

    def involution(p):
        def act(m, core):
            ke, ka, kb = core
            (re, ce) = ke
            return ((re, flip_core(ce)), kb, ka)

        return act

    orbits = [OrbitBased(tensors[p], involution(p)) for p in range(P + 1)]

    def coface_core(p, k, m, core):
        ke, ka, kb = core
        ra, ca = ka
        rb, cb = kb
        new = (
            ke,
            (ra, base.coface_core(p, k, m - len(ra), ca)),
            (rb, base.coface_core(p, k, m - len(rb), cb)),
        )
        return orbits[p].rep_of(m, new)

    def codegen_key(p, k, n, key):
        rep, core = key
        ke, ka, kb = core
        m = n - len(rep)
        out = {}
        part_a = base.codegen_key(p, k, m, ka)
        part_b = base.codegen_key(p, k, m, kb)
        for (ra2, ca2), pa in part_a.items():
            if not pa:
                continue
            for (rb2, cb2), pb in part_b.items():
                if not pb:
                    continue
                combo = (ke, (ra2, ca2), (rb2, cb2))
                trep, tcore = tensors[p - 1].renormalize(m, combo)
                full = compose_repeats(rep, n, trep)
                k2 = (full, orbits[p - 1].rep_of(m - len(trep), tcore))
                out[k2] = out.get(k2, 0) ^ 1
        return {k2: 1 for k2, parity in out.items() if parity}

    return BasedCosimplicialModule(P, orbits, coface_core, codegen_key)


def tensor_cosimplicial(a: BasedCosimplicialModule, b: BasedCosimplicialModule) -> BasedCosimplicialModule:
    """Degreewise tensor product of based cosimplicial modules."""
    if a.P != b.P:
        raise ValueError("cosimplicial truncation mismatch")
    P = a.P
    tensors = [TensorBased([a.level(p), b.level(p)]) for p in range(P + 1)]

    def coface_core(p, k, m, core):
        ka, kb = core
        ra, ca = ka
        rb, cb = kb
        return (
            (ra, a.coface_core(p, k, m - len(ra), ca)),
            (rb, b.coface_core(p, k, m - len(rb), cb)),
        )

    def codegen_key(p, k, n, key):
        rep, core = key
        ka, kb = core
        m = n - len(rep)
        out = {}
        for (ra2, ca2), pa in a.codegen_key(p, k, m, ka).items():
            if not pa:
                continue
            for (rb2, cb2), pb in b.codegen_key(p, k, m, kb).items():
                if not pb:
                    continue
                trep, tcore = tensors[p - 1].renormalize(m, ((ra2, ca2), (rb2, cb2)))
                k2 = (compose_repeats(rep, n, trep), tcore)
                out[k2] = out.get(k2, 0) ^ 1
        return {k2: 1 for k2, parity in out.items() if parity}

    return BasedCosimplicialModule(P, tensors, coface_core, codegen_key)


# -- conormalized cells -----------------------------------------------------------


class BasedChains:
    """Cosimplicial chain complex with combinatorial core bases per level."""

    def __init__(self, P: int):
        self.P = P

    def basis(self, p: int, n: int):
        raise NotImplementedError

    def boundary_label(self, p: int, n: int, label):
        raise NotImplementedError

    def coface_label(self, p: int, k: int, n: int, label):
        raise NotImplementedError

    def codegen_label(self, p: int, k: int, n: int, label):
        raise NotImplementedError


class ModuleChains(BasedChains):
    """Normalized chains of a based cosimplicial module."""

    def __init__(self, module: BasedCosimplicialModule):
        super().__init__(module.P)
        self.module = module

    def basis(self, p, n):
        if n < 0 or n > self.module.level(p).Q:
            return ()
        return self.module.level(p).cores(n)

    def boundary_label(self, p, n, label):
        return self.module.level(p).boundary_core(n, label)

    def coface_label(self, p, k, n, label):
        return self.module.coface_core(p, k, n, label)

    def codegen_label(self, p, k, n, label):
        out = []
        for (rep, c), parity in self.module.codegen_key(p, k, n, ((), label)).items():
            if parity and not rep:
                out.append(c)
        return out


class PairChains(BasedChains):
    """Levelwise tensor of the normalized chains of two based families."""

    def __init__(self, a: BasedChains, b: BasedChains):
        if a.P != b.P:
            raise ValueError("cosimplicial truncation mismatch")
        super().__init__(a.P)
        self.a = a
        self.b = b

    def basis(self, p, n):
        out = []
        for n1 in range(n + 1):
            for la in self.a.basis(p, n1):
                for lb in self.b.basis(p, n - n1):
                    out.append((n1, la, lb))
        return out

    def boundary_label(self, p, n, label):
        n1, la, lb = label
        out = []
        for la2 in self.a.boundary_label(p, n1, la):
            out.append((n1 - 1, la2, lb))
        for lb2 in self.b.boundary_label(p, n - n1, lb):
            out.append((n1, la, lb2))
        return out

    def coface_label(self, p, k, n, label):
        n1, la, lb = label
        return (
            n1,
            self.a.coface_label(p, k, n1, la),
            self.b.coface_label(p, k, n - n1, lb),
        )

    def codegen_label(self, p, k, n, label):
        n1, la, lb = label
        out = []
        for la2 in self.a.codegen_label(p, k, n1, la):
            for lb2 in self.b.codegen_label(p, k, n - n1, lb):
                out.append((n1, la2, lb2))
        return out


class OrbitSquareChains(BasedChains):
    """The family p -> W (x)_pi (N^p (x) N^p) for a based cosimplicial V.

    Labels are (i, n1, a, b): the free-resolution degree and a pair of
    normalized cores; the involution is already divided out, so the
    differential carries e_i to the swap-symmetrized pair.
    """

    def __init__(self, chains: ModuleChains, w_top: int):
        super().__init__(chains.P)
        self.inner = chains
        self.w_top = w_top

    def basis(self, p, n):
        out = []
        for i in range(min(self.w_top, n) + 1):
            for n1 in range(n - i + 1):
                for la in self.inner.basis(p, n1):
                    for lb in self.inner.basis(p, n - i - n1):
                        out.append((i, n1, la, lb))
        return out

    def boundary_label(self, p, n, label):
        i, n1, la, lb = label
        n2 = n - i - n1
        out = {}
        if i >= 1:
            xor_into(out, [(i - 1, n1, la, lb), (i - 1, n2, lb, la)])
        for la2 in self.inner.boundary_label(p, n1, la):
            xor_into(out, [(i, n1 - 1, la2, lb)])
        for lb2 in self.inner.boundary_label(p, n2, lb):
            xor_into(out, [(i, n1, la, lb2)])
        return [k for k, parity in out.items() if parity]

    def coface_label(self, p, k, n, label):
        i, n1, la, lb = label
        return (
            i,
            n1,
            self.inner.coface_label(p, k, n1, la),
            self.inner.coface_label(p, k, n - i - n1, lb),
        )

    def codegen_label(self, p, k, n, label):
        i, n1, la, lb = label
        out = []
        for la2 in self.inner.codegen_label(p, k, n1, la):
            for lb2 in self.inner.codegen_label(p, k, n - i - n1, lb):
                out.append((i, n1, la2, lb2))
        return out


def conormalize_based(chains: BasedChains, p_max: int, n_max: int,
                      window: Optional[SpectralWindow] = None) -> Bicomplex:
    """Bicomplex of conormalized cells: cores that are not coface images.

    The horizontal differential is the zeroth coface with coface-image cells
    sent to zero; hooks expose the label-level operators for the maps that
    act on representatives.
    """
    window = window or SpectralWindow(p_max, n_max)
    cell_basis = {}
    cell_index = {}
    for p in range(p_max + 1):
        for n in range(n_max + 1):
            basis = list(chains.basis(p, n))
            if p >= 1:
                excluded = set()
                for k in range(1, p + 1):
                    for lab in chains.basis(p - 1, n):
                        excluded.add(chains.coface_label(p, k, n, lab))
                basis = [lab for lab in basis if lab not in excluded]
            cell_basis[(p, n)] = basis
            cell_index[(p, n)] = {lab: i for i, lab in enumerate(basis)}
    dims = {cell: len(basis) for cell, basis in cell_basis.items()}

    def project(p, n, labels):
        idx = cell_index[(p, n)]
        out = 0
        counts = {}
        xor_into(counts, labels)
        for lab, parity in counts.items():
            if parity and lab in idx:
                out ^= 1 << idx[lab]
        return out

    dv = {}
    dh = {}
    for (p, n), basis in cell_basis.items():
        if n >= 1:
            cols = [project(p, n - 1, chains.boundary_label(p, n, lab)) for lab in basis]
            dv[(p, n)] = BitMatrix.from_columns(dims.get((p, n - 1), 0), cols)
        if p + 1 <= p_max:
            cols = [project(p + 1, n, [chains.coface_label(p + 1, 0, n, lab)]) for lab in basis]
            dh[(p, n)] = BitMatrix.from_columns(dims.get((p + 1, n), 0), cols)

    def lift(p, n, coords):
        basis = cell_basis[(p, n)]
        out = set()
        rest = coords
        while rest:
            low = rest & -rest
            out.add(basis[low.bit_length() - 1])
            rest ^= low
        return out

    def coface(p_from, k, n, labels):
        return {chains.coface_label(p_from + 1, k, n, lab) for lab in labels}

    def codegen(p_from, k, n, labels):
        counts = {}
        for lab in labels:
            xor_into(counts, chains.codegen_label(p_from, k, n, lab))
        return {lab for lab, parity in counts.items() if parity}

    hooks = {
        "lift": lift,
        "project": project,
        "coface": coface,
        "codegen": codegen,
        "cell_basis": cell_basis,
        "cell_index": cell_index,
        "chains": chains,
    }
    if isinstance(chains, PairChains):
        def inject_pair(p, n, n1, ea, eb):
            counts = {}
            for la in ea:
                for lb in eb:
                    key = (n1, la, lb)
                    counts[key] = counts.get(key, 0) ^ 1
            return {key for key, parity in counts.items() if parity}

        def decompose_pair(p, n, labels):
            return [(n1, {la}, {lb}) for (n1, la, lb) in labels]

        hooks["inject_pair"] = inject_pair
        hooks["decompose_pair"] = decompose_pair
    return Bicomplex(window, dims, dv, dh, hooks)
