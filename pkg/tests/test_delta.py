from math import comb

import pytest

from cosq.delta import (
    MonotoneMap,
    Shuffle,
    all_monotone_maps,
    compose,
    compose_repeats,
    enumerate_shuffles,
    epi_from_repeats,
    epi_mono_factorize,
    eta_restricted,
    eta_restricted_inverse,
    recompose_epi_mono,
    shuffle_merge,
    shuffle_split,
    word_as_map,
)


def test_compose_simplicial_identity():
    d0 = MonotoneMap.coface(0, 1)
    s0 = MonotoneMap.codegeneracy(0, 0)
    assert compose(d0, s0) == MonotoneMap.identity(0)


def test_compose_two_cofaces():
    d0 = MonotoneMap.coface(0, 1)
    d2 = MonotoneMap.coface(2, 2)
    assert compose(d0, d2).values == (1,)


def test_compose_endpoint_fault():
    with pytest.raises(ValueError):
        compose(MonotoneMap.identity(2), MonotoneMap.identity(3))


def test_compose_associative_exhaustive():
    maps = {
        (p, q): list(all_monotone_maps(p, q)) for p in range(3) for q in range(3)
    }
    for p in range(3):
        for q in range(3):
            for r in range(3):
                for f in maps[(p, q)]:
                    for g in maps[(q, r)]:
                        for h in maps[(r, 2)]:
                            assert compose(compose(f, g), h) == compose(f, compose(g, h))


def test_epi_mono_identity():
    assert epi_mono_factorize(MonotoneMap.identity(3)) == ((), ())


def test_epi_mono_explicit():
    f = MonotoneMap(2, 2, (0, 0, 2))
    degs, faces = epi_mono_factorize(f)
    assert degs == (0,)
    assert faces == (1,)


def test_epi_mono_recompose_exhaustive():
    for p in range(5):
        for q in range(5):
            for f in all_monotone_maps(p, q):
                degs, faces = epi_mono_factorize(f)
                assert recompose_epi_mono(p, q, degs, faces) == f


def test_epi_from_repeats_roundtrip():
    for n in range(6):
        for f in all_monotone_maps(n, n):
            if f.is_surjective():
                assert epi_from_repeats(n, f.repeats()) == f


def test_compose_repeats_matches_composition():
    for n in range(1, 5):
        for f in all_monotone_maps(n, n - 1):
            if not f.is_surjective():
                continue
            for g in all_monotone_maps(n - 1, n - 2 if n >= 2 else 0):
                if g.target != n - 2 or not g.is_surjective():
                    continue
                expected = compose(f, g).repeats()
                assert compose_repeats(f.repeats(), n, g.repeats()) == expected


def test_shuffle_counts():
    assert len(enumerate_shuffles(1, 1)) == 2
    for q in range(5):
        assert len(enumerate_shuffles(0, q)) == 1
    assert len(enumerate_shuffles(3, 3)) == 20


def test_shuffle_split_counts():
    # Vandermonde at p = q = 1, z = 1 and p = q = 2, z = 2
    sizes = [
        len(enumerate_shuffles(k, 1 - k)) * len(enumerate_shuffles(1 - k, k))
        for k in (0, 1)
    ]
    assert sizes == [1, 1]
    sizes = [
        len(enumerate_shuffles(k, 2 - k)) * len(enumerate_shuffles(2 - k, k))
        for k in (0, 1, 2)
    ]
    assert sizes == [1, 4, 1] and sum(sizes) == comb(4, 2)


def test_shuffle_split_roundtrip_exhaustive():
    p, q, z = 3, 2, 2
    for gamma in enumerate_shuffles(p, q):
        k, alpha, beta = shuffle_split(p, q, z, gamma)
        assert shuffle_merge(p, q, z, k, alpha, beta) == gamma


def test_shuffle_merge_is_bijective_small():
    for p in range(1, 5):
        for q in range(1, 5):
            for z in range(1, p + q):
                seen = set()
                total = 0
                for k in range(max(0, z - q), min(p, z) + 1):
                    for alpha in enumerate_shuffles(k, z - k):
                        for beta in enumerate_shuffles(p - k, q + k - z):
                            gamma = shuffle_merge(p, q, z, k, alpha, beta)
                            seen.add(gamma)
                            total += 1
                assert total == comb(p + q, p)
                assert len(seen) == total


def test_shuffle_split_fault_out_of_range():
    gamma = enumerate_shuffles(2, 2)[0]
    with pytest.raises(ValueError):
        shuffle_split(2, 2, 0, gamma)
    with pytest.raises(ValueError):
        shuffle_split(2, 2, 4, gamma)


def test_eta_restricted_identity_at_zero_depth():
    for mu in enumerate_shuffles(2, 3):
        assert eta_restricted(2, 3, 0, mu) == mu


def test_eta_restricted_inverse_pins_prefix():
    k, p, r = 2, 4, 2
    for alpha in enumerate_shuffles(k, p - r):
        mu = eta_restricted_inverse(k, p, r, alpha)
        for i in range(r):
            assert mu(k + i) == i
        assert eta_restricted(k, p, r, mu) == alpha


def test_eta_restricted_bijection_small():
    k, p, r = 1, 2, 1
    admissible = [mu for mu in enumerate_shuffles(k, p) if mu(0) >= r]
    target = enumerate_shuffles(k, p - r)
    assert len(admissible) == len(target) == 2
    for mu in admissible:
        assert eta_restricted_inverse(k, p, r, eta_restricted(k, p, r, mu)) == mu


def test_eta_restricted_fault():
    with pytest.raises(ValueError):
        eta_restricted(1, 2, 3, enumerate_shuffles(1, 2)[0])


def merge_word_identities(k, j, kbar, jbar):
    """The four operator-word identities behind the tensor-product theorem."""
    z = j + k
    p = k + kbar
    q = j + jbar
    for alpha in enumerate_shuffles(k, j):
        for beta in enumerate_shuffles(kbar, jbar):
            gamma = shuffle_merge(p, q, z, k, alpha, beta)
            top = [("s", gamma(c)) for c in range(p, p + q)]
            bottom = [("s", gamma(c)) for c in range(0, p)]
            up_word = [("d", i) for i in range(p + q, z, -1)]
            down_word = [("d", i) for i in range(z - 1, -1, -1)]

            lhs1 = word_as_map(top + up_word, z)
            rhs1 = word_as_map(
                [("d", i) for i in range(k + kbar, k, -1)]
                + [("s", alpha(c)) for c in range(k, k + j)],
                z,
            )
            assert lhs1 == rhs1

            lhs2 = word_as_map(bottom + up_word, z)
            rhs2 = word_as_map(
                [("d", i) for i in range(q, j, -1)]
                + [("s", alpha(c)) for c in range(0, k)],
                z,
            )
            assert lhs2 == rhs2

            # the second-factor identities originate from [p+q-z]
            zbar = p + q - z
            lhs3 = word_as_map(top + down_word, zbar)
            rhs3 = word_as_map(
                [("d", i) for i in range(k - 1, -1, -1)]
                + [("s", beta(c)) for c in range(kbar, kbar + jbar)],
                zbar,
            )
            assert lhs3 == rhs3

            lhs4 = word_as_map(bottom + down_word, zbar)
            rhs4 = word_as_map(
                [("d", i) for i in range(j - 1, -1, -1)]
                + [("s", beta(c)) for c in range(0, kbar)],
                zbar,
            )
            assert lhs4 == rhs4


def test_merge_operator_word_identities():
    for k in range(3):
        for j in range(3):
            for kbar in range(3):
                for jbar in range(3):
                    if k + j == 0 or kbar + jbar == 0:
                        continue
                    if 0 < j + k < k + kbar + j + jbar:
                        merge_word_identities(k, j, kbar, jbar)


def restricted_word_identities(k, p, r):
    """The operator-word identities behind the comodule-map theorem."""
    for alpha in enumerate_shuffles(k, p - r):
        mu = eta_restricted_inverse(k, p, r, alpha)
        low = [("d", i) for i in range(r - 1, -1, -1)]
        lhs1 = word_as_map([("s", mu(t)) for t in range(k)] + low, p - r + k)
        rhs1 = word_as_map(low + [("s", alpha(t)) for t in range(k)], p - r + k)
        assert lhs1 == rhs1

        lhs2 = word_as_map([("s", mu(t)) for t in range(k, p + k)] + low, p - r + k)
        rhs2 = word_as_map([("s", alpha(t)) for t in range(k, p + k - r)], p - r + k)
        assert lhs2 == rhs2


def test_restricted_operator_word_identities():
    for k in range(1, 4):
        for p in range(1, 5):
            for r in range(0, p + 1):
                restricted_word_identities(k, p, r)
