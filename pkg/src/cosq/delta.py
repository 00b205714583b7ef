"""Operator calculus of the simplex category.

Monotone maps [p] -> [q] are stored by their value tuples, shuffles as full
permutations, so index formulas transcribe literally.  Epis are often handled
through their repeat sets: a monotone surjection [n] ->> [m] is determined by
the positions i with f(i) = f(i+1).
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterator


class MonotoneMap:
    """A weakly monotone map [source] -> [target] in the simplex category."""

    __slots__ = ("source", "target", "values")

    def __init__(self, source: int, target: int, values):
        values = tuple(values)
        if source < 0 or target < 0:
            raise ValueError("negative simplex dimension")
        if len(values) != source + 1:
            raise ValueError("value tuple has wrong length")
        for v in values:
            if not 0 <= v <= target:
                raise ValueError("value out of codomain")
        if any(values[i] > values[i + 1] for i in range(source)):
            raise ValueError("values not monotone")
        self.source = source
        self.target = target
        self.values = values

    @classmethod
    def identity(cls, n: int) -> "MonotoneMap":
        return cls(n, n, range(n + 1))

    @classmethod
    def coface(cls, i: int, n: int) -> "MonotoneMap":
        """d^i : [n-1] -> [n], the injection missing i."""
        if not 0 <= i <= n:
            raise ValueError("coface index out of range")
        return cls(n - 1, n, [j if j < i else j + 1 for j in range(n)])

    @classmethod
    def codegeneracy(cls, i: int, n: int) -> "MonotoneMap":
        """s^i : [n+1] -> [n], hitting i twice."""
        if not 0 <= i <= n:
            raise ValueError("codegeneracy index out of range")
        return cls(n + 1, n, [j if j <= i else j - 1 for j in range(n + 2)])

    def __call__(self, j: int) -> int:
        return self.values[j]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MonotoneMap)
            and self.source == other.source
            and self.target == other.target
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.source, self.target, self.values))

    def __repr__(self) -> str:
        return f"MonotoneMap([{self.source}]->[{self.target}], {self.values})"

    def is_injective(self) -> bool:
        return all(self.values[i] < self.values[i + 1] for i in range(self.source))

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.target + 1))

    def repeats(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.source) if self.values[i] == self.values[i + 1])

    def missing(self) -> tuple[int, ...]:
        hit = set(self.values)
        return tuple(v for v in range(self.target + 1) if v not in hit)


def compose(f: MonotoneMap, g: MonotoneMap) -> MonotoneMap:
    """g after f; faults unless target(f) = source(g)."""
    if f.target != g.source:
        raise ValueError("endpoint mismatch in composition")
    return MonotoneMap(f.source, g.target, [g.values[v] for v in f.values])


def all_monotone_maps(p: int, q: int) -> Iterator[MonotoneMap]:
    """All monotone maps [p] -> [q] in lexicographic order."""
    for positions in combinations(range(p + q + 1), p + 1):
        values = [positions[i] - i for i in range(p + 1)]
        yield MonotoneMap(p, q, values)


def epi_mono_factorize(f: MonotoneMap) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Unique factorization f = (face word) o (degeneracy word).

    Returns (degeneracy indices, face indices), both strictly increasing; the
    degeneracy word s^{j_1}..s^{j_k} collapses the repeats of f and the face
    word d^{i_1}..d^{i_r} inserts the values f misses.  Recompose with
    `recompose_epi_mono`.
    """
    return f.repeats(), f.missing()


def epi_from_repeats(n: int, repeats) -> MonotoneMap:
    """The monotone surjection [n] ->> [n - len(repeats)] with given repeats."""
    repeats = set(repeats)
    values = []
    v = 0
    for i in range(n + 1):
        values.append(v)
        if i not in repeats:
            v += 1
    return MonotoneMap(n, n - len(repeats), values)


def mono_from_image(m: int, image) -> MonotoneMap:
    """The injection [len(image)-1] -> [m] with the given image."""
    image = sorted(image)
    return MonotoneMap(len(image) - 1, m, image)


def recompose_epi_mono(source: int, target: int, degeneracies, faces) -> MonotoneMap:
    epi = epi_from_repeats(source, degeneracies)
    image = [v for v in range(target + 1) if v not in set(faces)]
    mono = mono_from_image(target, image)
    return compose(epi, mono)


def compose_repeats(inner: tuple[int, ...], inner_level: int, outer: tuple[int, ...]) -> tuple[int, ...]:
    """Repeat set of g o f for epis f (repeats `inner`, on [inner_level]) and g.

    g's repeats are positions in the target of f; the composite repeats at i
    when f repeats there, or when f's value there is a repeat of g.
    """
    inner_set = set(inner)
    outer_set = set(outer)
    out = []
    v = 0
    for i in range(inner_level):
        if i in inner_set:
            out.append(i)
        else:
            if v in outer_set:
                out.append(i)
            v += 1
    return tuple(out)


class Shuffle:
    """A (p, q)-shuffle as a permutation of {0, .., p+q-1}.

    The first p values and the last q values are each increasing; the first
    block records where the second tensor factor gets degenerated and vice
    versa, matching the classical shuffle-map formula.
    """

    __slots__ = ("p", "q", "perm")

    def __init__(self, p: int, q: int, perm):
        perm = tuple(perm)
        if len(perm) != p + q or sorted(perm) != list(range(p + q)):
            raise ValueError("not a permutation of {0,..,p+q-1}")
        if any(perm[i] >= perm[i + 1] for i in range(p - 1)):
            raise ValueError("first block not increasing")
        if any(perm[i] >= perm[i + 1] for i in range(p, p + q - 1)):
            raise ValueError("second block not increasing")
        self.p = p
        self.q = q
        self.perm = perm

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def first_block(self) -> tuple[int, ...]:
        return self.perm[: self.p]

    def second_block(self) -> tuple[int, ...]:
        return self.perm[self.p :]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Shuffle)
            and (self.p, self.q, self.perm) == (other.p, other.q, other.perm)
        )

    def __hash__(self):
        return hash((self.p, self.q, self.perm))

    def __repr__(self) -> str:
        return f"Shuffle({self.p},{self.q};{self.perm})"


def enumerate_shuffles(p: int, q: int) -> list[Shuffle]:
    """All (p, q)-shuffles, ordered lexicographically by the first block."""
    if p < 0 or q < 0:
        raise ValueError("negative shuffle parameters")
    out = []
    universe = range(p + q)
    for first in combinations(universe, p):
        first_set = set(first)
        second = tuple(i for i in universe if i not in first_set)
        out.append(Shuffle(p, q, first + second))
    assert len(out) == comb(p + q, p)
    return out


def shuffle_split(p: int, q: int, z: int, gamma: Shuffle) -> tuple[int, Shuffle, Shuffle]:
    """Split a (p, q)-shuffle at the cut z.

    Inverse of `shuffle_merge`: recovers k as the least position whose value
    is >= z, then extracts alpha in Sh(k, z-k) and beta in Sh(p-k, q+k-z).
    """
    if not 0 < z < p + q:
        raise ValueError("cut out of range")
    if (gamma.p, gamma.q) != (p, q):
        raise ValueError("shuffle has wrong type")
    k = p
    for c in range(p):
        if gamma(c) >= z:
            k = c
            break
    alpha_perm = [gamma(c) for c in range(0, k)] + [gamma(c) for c in range(p, p + z - k)]
    beta_perm = [gamma(c) - z for c in range(k, p)] + [gamma(c) - z for c in range(p + z - k, p + q)]
    alpha = Shuffle(k, z - k, alpha_perm)
    beta = Shuffle(p - k, q + k - z, beta_perm)
    return k, alpha, beta


def shuffle_merge(p: int, q: int, z: int, k: int, alpha: Shuffle, beta: Shuffle) -> Shuffle:
    """The merge sending (alpha, beta) at cut position k to a (p, q)-shuffle."""
    if not 0 < z < p + q:
        raise ValueError("cut out of range")
    if (alpha.p, alpha.q) != (k, z - k) or (beta.p, beta.q) != (p - k, q + k - z):
        raise ValueError("component shuffles have wrong type")
    perm = []
    for c in range(p + q):
        if c <= k - 1:
            perm.append(alpha(c))
        elif c <= p - 1:
            perm.append(beta(c - k) + z)
        elif c <= p + z - k - 1:
            perm.append(alpha(c - p + k))
        else:
            perm.append(beta(c - z) + z)
    return Shuffle(p, q, perm)


def eta_restricted(k: int, p: int, r: int, mu: Shuffle) -> Shuffle:
    """Compress a (k, p)-shuffle whose first value is at least r to Sh(k, p-r)."""
    if not 0 <= r <= p:
        raise ValueError("restriction depth out of range")
    if (mu.p, mu.q) != (k, p):
        raise ValueError("shuffle has wrong type")
    if k > 0 and mu(0) < r:
        raise ValueError("shuffle does not satisfy the first-value bound")
    perm = [mu(t) - r for t in range(k)] + [mu(t + r) - r for t in range(k, k + p - r)]
    return Shuffle(k, p - r, perm)


def eta_restricted_inverse(k: int, p: int, r: int, alpha: Shuffle) -> Shuffle:
    """Inverse of `eta_restricted`; the image fixes positions k..k+r-1 to 0..r-1."""
    if not 0 <= r <= p:
        raise ValueError("restriction depth out of range")
    if (alpha.p, alpha.q) != (k, p - r):
        raise ValueError("shuffle has wrong type")
    perm = []
    for t in range(k + p):
        if t <= k - 1:
            perm.append(alpha(t) + r)
        elif t <= k + r - 1:
            perm.append(t - k)
        else:
            perm.append(alpha(t - r) + r)
    return Shuffle(k, p, perm)


def word_as_map(word, n: int) -> MonotoneMap:
    """Evaluate an operator word on [n], rightmost letter first.

    Letters are ("d", i) for a coface and ("s", i) for a codegeneracy; the
    word is read like function composition.
    """
    f = MonotoneMap.identity(n)
    for kind, i in reversed(list(word)):
        if kind == "d":
            step = MonotoneMap.coface(i, f.target + 1)
        elif kind == "s":
            step = MonotoneMap.codegeneracy(i, f.target - 1)
        else:
            raise ValueError(f"unknown letter {kind!r}")
        f = compose(f, step)
    return f
