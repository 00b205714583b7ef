import pytest

from cosq.based import ModuleChains, conormalize_based
from cosq.chains import homology_dims
from cosq.cosimplicial import (
    BicomplexTensor,
    SpectralWindow,
    WindowError,
    conormalize,
    constant_cosimplicial,
    csm_tensor,
    total,
)
from cosq.gf2 import BitMatrix
from cosq.simplicial import linearize, simplex
from cosq.universal import build_universal


def test_constant_cosimplicial_identities():
    m = linearize(simplex(1, 3))
    cm = constant_cosimplicial(m, 3)
    cm.validate()


def test_conormalize_constant_concentrated_in_degree_zero():
    m = linearize(simplex(2, 3))
    cc = constant_cosimplicial(m, 3).to_chain_levels()
    bic = conormalize(cc)
    for p in range(1, 4):
        for n in range(4):
            assert bic.dim(p, n) == 0
    n0 = [bic.dim(0, n) for n in range(4)]
    assert n0 == [cc.levels[0].dim(n) for n in range(4)]


def test_dense_conormalize_matches_based_on_universal():
    u = build_universal(1, 1, 3, 4)
    # dual description: conormalized dims equal those of the structured path
    from cosq.cosimplicial import CosimplicialChainComplex
    from cosq.simplicial import normalize
    from cosq.gf2 import induced_matrix

    dense = u.dense_levels()
    normalized = [dense.normalized[p] for p in range(4)]
    coface = {
        (p, k): {
            n: induced_matrix(
                dense.coface_mat(p, k, n),
                normalized[p - 1].presentations[n],
                normalized[p].presentations[n],
            )
            for n in range(5)
        }
        for p in range(1, 4)
        for k in range(p + 1)
    }
    codegen = {
        (p, k): {
            n: induced_matrix(
                dense.codegen_mat(p + 1, k, n),
                normalized[p + 1].presentations[n],
                normalized[p].presentations[n],
            )
            for n in range(5)
        }
        for p in range(3)
        for k in range(p + 1)
    }
    ccx = CosimplicialChainComplex(3, normalized, coface, codegen)
    dense_bic = conormalize(ccx)
    for p in range(4):
        for n in range(5):
            assert dense_bic.dim(p, n) == u.bicomplex.dim(p, n)
    dense_bic.validate()
    # total homology agrees as well
    hd = homology_dims(total(dense_bic).chain_complex(), range(0, 2))
    hb = homology_dims(u.filtered.chain_complex(), range(0, 2))
    assert hd == hb


def test_based_bicomplex_validates():
    u = build_universal(1, 2, 4, 5)
    u.bicomplex.validate()


def test_total_single_cell():
    window = SpectralWindow(3, 3)
    dims = {(2, 3): 1}
    bic_dims = {(p, n): dims.get((p, n), 0) for p in range(4) for n in range(4)}
    from cosq.cosimplicial import Bicomplex

    b = Bicomplex(window, bic_dims, {}, {})
    f = total(b)
    assert f.dim(1) == 1
    assert f.filtration_mask(1, 2) == 1
    assert f.filtration_mask(1, 3) == 0


def test_truncation_projection_is_chain_map():
    u = build_universal(1, 1, 4, 4)
    f = u.filtered
    quotient, proj = f.truncation_projection(1)
    for m in range(f.lo + 1, f.hi + 1):
        assert quotient.boundary(m) @ proj[m] == proj[m - 1] @ f.boundary(m)


def test_t_ell_dims_sum_over_columns():
    u = build_universal(1, 1, 4, 4)
    f = u.filtered
    for ell in range(5):
        t_ell = total(u.bicomplex, ell)
        for m in range(t_ell.lo, t_ell.hi + 1):
            expect = sum(
                u.bicomplex.dim(p, m + p)
                for p in range(0, ell + 1)
                if 0 <= m + p <= 4
            )
            assert t_ell.dim(m) == expect


def test_window_refuses_out_of_range():
    w = SpectralWindow(4, 4)
    with pytest.raises(WindowError):
        w.assert_entry(4, 1, r=1)
    with pytest.raises(WindowError):
        w.assert_entry(1, 4, r=1)
    w.assert_entry(1, 1, r=2)


def test_csm_tensor_dims_multiply():
    a = constant_cosimplicial(linearize(simplex(1, 2)), 2)
    b = constant_cosimplicial(linearize(simplex(0, 2)), 2)
    t = csm_tensor(a, b)
    t.validate()
    for p in range(3):
        for n in range(3):
            assert t.levels[p].dim(n) == a.levels[p].dim(n) * b.levels[p].dim(n)


def test_bicomplex_tensor_total_squares_to_zero():
    u = build_universal(1, 1, 3, 3)
    bt = BicomplexTensor(u.bicomplex, u.bicomplex)
    bt.bicomplex.validate()
    f = total(bt.bicomplex)
    for m in range(f.lo + 2, f.hi + 1):
        assert (f.boundary(m - 1) @ f.boundary(m)).is_zero()


def test_conormalized_dims_match_codegeneracy_kernels():
    # dual description: the conormalized cell has the dimension of the
    # intersection of the codegeneracy kernels
    from cosq.gf2 import kernel_basis

    u = build_universal(1, 1, 3, 4)
    dense = u.dense_levels()
    for p in range(1, 4):
        for n in range(5):
            rows = []
            for k in range(p):
                rows.extend(dense.codegen_mat(p, k, n).rows)
            level_dim = dense.modules[p].dim(n)
            inter = kernel_basis(BitMatrix(len(rows), level_dim, rows))
            # intersect with normalized classes: count only nondegenerate part
            pres = dense.normalized[p].presentations[n]
            seen = {pres.coords(v) for v in inter.basis}
            from cosq.gf2 import Subspace

            reduced = Subspace(pres.dim, [pres.coords(v) for v in inter.basis])
            assert reduced.dim == u.bicomplex.dim(p, n)


def test_cosimplicial_shuffle_after_aw_is_homology_identity():
    from cosq.chains import induced_on_homology
    from cosq.cosimplicial import caw_cosimplicial, cshuffle_cosimplicial
    from cosq.gf2 import rank
    from cosq.operations import TensorFamily, bicomplex_chain_map

    from cosq.cosimplicial import FilteredComplex

    u = build_universal(1, 1, 3, 4)
    tf = TensorFamily(u, u, p_max=3, n_max=7)
    bt = BicomplexTensor(u.bicomplex, u.bicomplex)
    # truncate at the columns both factors cover, so the composites are
    # honest chain maps of the truncated totals
    ft_bt = FilteredComplex(bt.bicomplex, 3)
    ft_pair = FilteredComplex(tf.pair_bic, 3)
    caw_tot = bicomplex_chain_map(caw_cosimplicial(bt, tf.pair_bic), ft_bt, ft_pair)
    shf_tot = bicomplex_chain_map(cshuffle_cosimplicial(tf.pair_bic, bt), ft_pair, ft_bt)
    src = ft_bt.chain_complex()
    comp = {m: shf_tot[m] @ caw_tot[m] for m in caw_tot if m in shf_tot}
    for m in range(0, 2):
        ind = induced_on_homology(comp, src, src, m)
        assert ind == BitMatrix.identity(ind.nrows)
