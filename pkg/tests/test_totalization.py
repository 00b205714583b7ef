import pytest

from cosq.chains import homology, homology_dims, induced_on_homology
from cosq.cosimplicial import conormalize, constant_cosimplicial, total
from cosq.gf2 import BitMatrix, rank
from cosq.simplicial import linearize, monotone_tuples, normalize, simplex
from cosq.specseq import chain_map_on_totals
from cosq.totalization import TotValues, _drop, phi_on_normalized, tot_ell, tot_pushforward
from cosq.universal import build_universal


def constant_bicomplex(p_count, Q):
    m = linearize(simplex(1, Q))
    cc = constant_cosimplicial(m, p_count).to_chain_levels()
    return m, conormalize(cc)


def test_tot_of_constant_is_the_module():
    m, bic = constant_bicomplex(3, 3)
    tot = tot_ell(bic, None, 3)
    assert [tot.dim(q) for q in range(4)] == m.dims
    tot.module.validate()


def test_tot_level_zero_skeleton():
    # a level-0 skeleton sees only the zeroth cosimplicial degree
    m, bic = constant_bicomplex(3, 3)
    tot0 = tot_ell(bic, 0, 2)
    assert [tot0.dim(q) for q in range(3)] == m.dims[:3]
    u = build_universal(1, 1, 3, 4)
    tot0 = tot_ell(u.bicomplex, 0, 2)
    assert [tot0.dim(q) for q in range(3)] == [0, 0, 0]


def test_tot_ell_fault_beyond_range():
    u = build_universal(1, 1, 3, 4)
    with pytest.raises(ValueError):
        tot_ell(u.bicomplex, 5, 2)


def test_universal_tot_homology_and_identities():
    u = build_universal(1, 1, 4, 5)
    tot = tot_ell(u.bicomplex, None, 3)
    assert [tot.dim(q) for q in range(4)] == [1, 1, 1, 1]
    tot.module.validate()
    n = normalize(tot.module)
    assert homology_dims(n, range(3)) == {0: 1, 1: 0, 2: 0}


def test_suspended_universal_tot_homology():
    u = build_universal(1, 2, 2, 5)
    tot = tot_ell(u.bicomplex, None, 3)
    n = normalize(tot.module)
    assert homology_dims(n, range(3)) == {0: 0, 1: 1, 2: 0}


def test_phi_is_chain_map_and_quasi_iso():
    u = build_universal(1, 1, 4, 5)
    tot = tot_ell(u.bicomplex, None, 3)
    maps, ntot = phi_on_normalized(tot, u.filtered)
    assert chain_map_ok_on(maps, ntot, u.filtered)
    tcx = u.filtered.chain_complex()
    for m in range(0, 2):
        ind = induced_on_homology(maps, ntot, tcx, m)
        hs = homology(ntot, m)
        ht = homology(tcx, m)
        assert hs.dim == ht.dim and rank(ind) == hs.dim


def chain_map_ok_on(maps, src, f):
    return chain_map_on_totals(maps, src, f.chain_complex(), range(1, 4))


def test_tot_values_are_natural():
    u = build_universal(1, 1, 2, 4)
    tot = tot_ell(u.bicomplex, None, 2)
    dense = u.dense_levels()
    q = 2
    for sol in tot.solutions[q].basis:
        tv = TotValues(tot, dense, q, sol)
        for p in range(3):
            for n in range(1, 4):
                for x in monotone_tuples(n, p):
                    for b in monotone_tuples(n, q):
                        v = tv.value(p, n, x, b)
                        for i in range(n + 1):
                            lhs = dense.modules[p].face(n, i).apply(v)
                            rhs = tv.value(p, n - 1, _drop(x, i), _drop(b, i))
                            assert lhs == rhs
        for p in range(1, 3):
            for n in range(3):
                for x in monotone_tuples(n, p - 1):
                    for b in monotone_tuples(n, q):
                        v = tv.value(p - 1, n, x, b)
                        for k in range(p + 1):
                            xk = tuple(val if val < k else val + 1 for val in x)
                            assert dense.coface_mat(p, k, n).apply(v) == tv.value(p, n, xk, b)


def test_tot_pushforward_identity():
    u = build_universal(1, 1, 3, 4)
    tot = tot_ell(u.bicomplex, None, 2)
    ident_cells = {
        (p, n): BitMatrix.identity(u.bicomplex.dim(p, n))
        for p in range(4)
        for n in range(5)
        if u.bicomplex.dim(p, n)
    }
    maps = tot_pushforward(tot, tot, ident_cells)
    for q in range(3):
        assert maps[q] == BitMatrix.identity(tot.dim(q))
