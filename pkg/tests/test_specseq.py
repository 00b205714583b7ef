import pytest

from cosq.cosimplicial import Bicomplex, SpectralWindow, total
from cosq.gf2 import BitMatrix, rank
from cosq.operations import OrbitSquare, theta_cell_maps, bicomplex_chain_map
from cosq.specseq import (
    abutment_filtration,
    abutment_map,
    abutment_map_of_cycle,
    cycles_boundaries,
    e_infinity_entry,
    filtration_homology_dims,
    homology_of_total,
    image_on_kernel,
    induced_page_map,
    next_page_dims_from,
    page,
    page_entry,
    strong_convergence_check,
)
from cosq.universal import build_universal, small_model_bicomplex


def single_column_complex():
    """A one-column bicomplex: cells (1, n) with a rank-one differential."""
    window = SpectralWindow(2, 3)
    dims = {(1, 1): 2, (1, 2): 1}
    dv = {(1, 2): BitMatrix.from_dense([[1], [0]])}
    return Bicomplex(window, dims, dv, {})


def test_single_column_cycles_stable():
    f = total(single_column_complex())
    z1, b1 = cycles_boundaries(f, 1, 1, 2)
    for r in range(2, 5):
        zr, _ = cycles_boundaries(f, r, 1, 2)
        assert zr.basis == z1.basis


def test_boundaries_inside_cycles_random_small():
    import random

    rng = random.Random(11)
    for trial in range(10):
        window = SpectralWindow(2, 3)
        dims = {(p, n): rng.randrange(1, 3) for p in range(3) for n in range(3)}
        # random commuting differentials are hard to draw; use zero verticals
        dh = {}
        for p in range(2):
            for n in range(3):
                dh[(p, n)] = BitMatrix(
                    dims[(p + 1, n)], dims[(p, n)],
                    [rng.getrandbits(dims[(p, n)]) for _ in range(dims[(p + 1, n)])],
                )
        # enforce dh^2 = 0 by zeroing the second step
        for n in range(3):
            dh[(1, n)] = BitMatrix.zeros(dims[(2, n)], dims[(1, n)])
        b = Bicomplex(window, dims, {}, dh)
        b.validate()
        f = total(b)
        for s in range(3):
            for t in range(3):
                for r in range(1, 3):
                    z, bb = cycles_boundaries(f, r, s, t)
                    for v in bb.basis:
                        assert z.contains(v)


def test_empty_filtration_gives_zero_cycles():
    f = total(single_column_complex())
    z, _ = cycles_boundaries(f, 1, 2, 3)
    assert z.dim == 0


def test_page_dims_match_iterated_homology():
    u = build_universal(1, 1, 4, 5)
    sm = small_model_bicomplex(u, p_max=4, n_max=5)
    f = total(sm)
    region = [(s1, t1) for s1 in range(4) for t1 in range(4) if t1 >= s1]
    entries1, diffs1 = page(f, 1, region, check_window=False)
    predicted = next_page_dims_from(entries1, diffs1)
    entries2, _ = page(f, 2, region, check_window=False)
    for key in region:
        assert entries2[key].dim == predicted[key], key


def test_page_differential_squares_to_zero():
    u = build_universal(1, 1, 4, 5)
    sm = small_model_bicomplex(u, p_max=4, n_max=5)
    f = total(sm)
    region = [(s1, t1) for s1 in range(4) for t1 in range(5) if t1 >= s1]
    entries, diffs = page(f, 1, region, check_window=False)
    for (s1, t1), d in diffs.items():
        nxt = diffs.get((s1 + 1, t1))
        if nxt is not None:
            assert (nxt @ d).is_zero()


def test_strong_convergence_on_small_model():
    u = build_universal(1, 1, 3, 5)
    sm = small_model_bicomplex(u, p_max=3, n_max=5)
    f = total(sm)
    for m in (0, 1):
        assert strong_convergence_check(f, m, range(0, 4))


def test_universal_abutment_filtration():
    u = build_universal(1, 1, 4, 4)
    h, filt = abutment_filtration(u.filtered, 0)
    assert h.dim == 1
    assert [sub.dim for sub in filt][:3] == [1, 1, 0]


def test_abutment_map_is_injective_and_canonical():
    u = build_universal(1, 1, 4, 4)
    entry = e_infinity_entry(u.filtered, 1, 1, check_window=False)
    assert entry.dim == 1
    coords = abutment_map(u.filtered, 1, 1, 1, entry)
    assert coords == 1
    assert abutment_map(u.filtered, 1, 1, 0, entry) == 0


def test_abutment_of_generator_cycle():
    u = build_universal(2, 2, 5, 5)
    z = u.generator_cycle()
    entry = e_infinity_entry(u.filtered, 2, 2, check_window=False)
    assert abutment_map_of_cycle(u.filtered, 2, 2, z, entry) != 0


def test_filtration_dims_by_ranks_agree_with_presentation():
    u = build_universal(1, 1, 4, 4)
    h, filt = abutment_filtration(u.filtered, 0)
    by_rank = filtration_homology_dims(u.filtered, 0, s_top=4)
    assert by_rank == [sub.dim for sub in filt][: len(by_rank)]


def test_induced_page_map_identity():
    u = build_universal(1, 1, 3, 4)
    f = u.filtered
    ident = {m: BitMatrix.identity(f.dim(m)) for m in range(f.lo, f.hi + 1)}
    src = page_entry(f, 1, 1, 1, check_window=False)
    ind = induced_page_map(ident, f, f, src, src)
    assert ind == BitMatrix.identity(src.dim)


def test_equivariant_shuffle_induces_first_page_iso():
    u = build_universal(1, 1, 3, 4)
    osq = OrbitSquare(u, p_max=3, n_max=4)
    sm = small_model_bicomplex(u, p_max=3, n_max=4)
    fsm = total(sm)
    maps = bicomplex_chain_map(theta_cell_maps(u, osq, sm), fsm, osq.filtered)
    for (s1, t1) in [(1, 2), (2, 2), (1, 3), (2, 3)]:
        src = page_entry(fsm, 1, s1, t1, check_window=False)
        tgt = page_entry(osq.filtered, 1, s1, t1, check_window=False)
        ind = induced_page_map(maps, fsm, osq.filtered, src, tgt)
        assert src.dim == tgt.dim
        assert rank(ind) == src.dim


def test_image_on_kernel_against_direct_computation():
    import random

    from cosq.gf2 import Subspace, kernel_basis

    rng = random.Random(7)
    for _ in range(20):
        g = BitMatrix(3, 6, [rng.getrandbits(6) for _ in range(3)])
        f = BitMatrix(4, 6, [rng.getrandbits(6) for _ in range(4)])
        fast = image_on_kernel(g, f)
        direct = Subspace(4, [f.apply(v) for v in kernel_basis(g).basis])
        assert fast.dim == direct.dim
        for v in direct.basis:
            assert fast.contains(v)


def test_single_column_filtration_jumps_once():
    f = total(single_column_complex())
    dims = filtration_homology_dims(f, 0, s_top=2)
    assert dims[0] == dims[1] == 1 and dims[2] == 0
