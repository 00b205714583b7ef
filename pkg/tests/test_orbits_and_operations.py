import pytest

from cosq.chains import (
    chain_map_ok,
    eq_shuffle_to_orbits,
    homology,
    homology_dims,
    induced_on_homology,
    orbit_square_map,
    qm_external,
    qm_is_chain_level,
    w_bar,
    w_tensor_pi,
)
from cosq.gf2 import BitMatrix, rank
from cosq.simplicial import (
    aw_simplicial,
    homotopy_orbits,
    k_eilenberg_pi,
    linearize,
    module_map_on_normalized,
    normalize,
    pi_tensor_square,
    shuffle_simplicial,
    simplex,
    sm_tensor,
    trivial_pi,
    xi,
)


def k_delta(p, Q):
    return linearize(simplex(p, Q))


def test_aw_degree_zero_is_identity():
    a = k_delta(1, 3)
    maps, target, nt, _ = aw_simplicial(a, a)
    assert maps[0] == BitMatrix.identity(4)


def test_aw_formula_level_one():
    a = k_delta(1, 2)
    maps, target, nt, t = aw_simplicial(a, a)
    # AW(a1 (x) b1) = d1 a (x) b + a (x) d0 b for the top edge pair
    na = normalize(a)
    edge = a.labels[1].index((0, 1))
    pair_idx = edge * a.dim(1) + edge
    col = maps[1].apply(nt.presentations[1].coords(1 << pair_idx))
    d1a = a.face(1, 1).apply(1 << edge)
    d0b = a.face(1, 0).apply(1 << edge)
    from cosq.chains import tensor_index

    expect = 0
    ca = na.presentations[0].coords(d1a)
    cb = na.presentations[1].coords(1 << edge)
    for x in range(na.dim(0)):
        if (ca >> x) & 1:
            expect ^= 1 << tensor_index(na, na, 1, 0, x, 0)
    ca = na.presentations[1].coords(1 << edge)
    cb = na.presentations[0].coords(d0b)
    for y in range(na.dim(0)):
        if (cb >> y) & 1:
            expect ^= 1 << tensor_index(na, na, 1, 1, 0, y)
    assert col == expect


def test_aw_and_shuffle_are_chain_maps():
    a = k_delta(1, 3)
    b = k_delta(2, 3)
    aw_maps, aw_target, nt, _ = aw_simplicial(a, b)
    assert chain_map_ok(aw_maps, nt, aw_target, range(1, 4))
    sh_maps, sh_source, nt2, _ = shuffle_simplicial(a, b)
    assert chain_map_ok(sh_maps, sh_source, nt2, range(1, 4))


def test_aw_after_shuffle_is_identity():
    a = k_delta(1, 3)
    aw_maps, target, _, _ = aw_simplicial(a, a)
    sh_maps, source, _, _ = shuffle_simplicial(a, a)
    for n in range(4):
        assert aw_maps[n] @ sh_maps[n] == BitMatrix.identity(source.dim(n))


def test_homotopy_orbit_dims():
    z = pi_tensor_square(k_delta(1, 3))
    orb = homotopy_orbits(z)
    for q in range(4):
        assert orb.quotient.dim(q) == (1 << q) * z.module.dim(q)
    orb.quotient.validate()


def test_homotopy_orbits_of_trivial_module_is_classifying_space():
    from cosq.simplicial import constant_module

    z = trivial_pi(constant_module(4))
    orb = homotopy_orbits(z)
    n = normalize(orb.quotient)
    assert [n.dim(k) for k in range(5)] == [1] * 5
    assert homology_dims(n, range(4)) == {0: 1, 1: 1, 2: 1, 3: 1}


def test_xi_is_simplicial_and_injective():
    m = k_delta(1, 3)
    orb, mats = xi(m)
    pair = sm_tensor(m, m)
    for n in range(1, 4):
        for i in range(n + 1):
            assert mats[n - 1] @ pair.face(n, i) == orb.quotient.face(n, i) @ mats[n]
    for n in range(4):
        assert rank(mats[n]) == pair.dim(n)


def test_xi_matches_shuffle_on_bottom_class():
    # the equivariant shuffle on e_0 (x) u (x) v recovers xi after the plain
    # shuffle of the two factors
    m = k_delta(1, 3)
    pair = pi_tensor_square(m)
    source, n_orbit, theta, orbits = eq_shuffle_to_orbits(pair)
    _, xi_mats = xi(m)
    n_pair = normalize(pair.module)
    nm = normalize(m)
    sh_maps, sh_source, _, _ = shuffle_simplicial(m, m)
    n_xi = module_map_on_normalized(xi_mats, pair.module, orbits.quotient, n_pair, normalize(orbits.quotient))
    for n in range(4):
        for x in range(nm.lo, nm.hi + 1):
            y = n - x
            if not (nm.lo <= y <= nm.hi):
                continue
            for a in range(nm.dim(x)):
                for b in range(nm.dim(y)):
                    col = source.index(n, 0, x, a, b)
                    lhs = theta[n].column(col)
                    from cosq.chains import tensor_index

                    pair_col = tensor_index(nm, nm, n, x, a, b)
                    rhs = n_xi[n].apply(sh_maps[n].column(pair_col))
                    assert lhs == rhs


def test_eq_shuffle_is_chain_map_and_quasi_iso():
    m = k_delta(1, 4)
    pair = pi_tensor_square(m)
    source, n_orbit, theta, _ = eq_shuffle_to_orbits(pair)
    assert chain_map_ok(theta, source.complex, n_orbit, range(1, 5))
    for k in range(3):
        ind = induced_on_homology(theta, source.complex, n_orbit, k)
        assert ind.nrows == ind.ncols
        assert rank(ind) == ind.nrows


def test_eq_shuffle_point_case():
    m = k_delta(0, 4)
    pair = pi_tensor_square(m)
    source, n_orbit, theta, _ = eq_shuffle_to_orbits(pair)
    bar = w_bar(4)
    for k in range(3):
        assert homology(source.complex, k).dim == homology(bar, k).dim == 1
        ind = induced_on_homology(theta, source.complex, n_orbit, k)
        assert rank(ind) == 1


def test_w_tensor_pi_dims_and_differential():
    c = normalize(k_delta(1, 3))
    orb = w_tensor_pi(c, 3)
    for n in range(4):
        expect = 0
        for i in range(0, n + 1):
            for x in range(c.lo, c.hi + 1):
                y = n - i - x
                if c.lo <= y <= c.hi:
                    expect += c.dim(x) * c.dim(y)
        assert orb.complex.dim(n) == expect
    orb.complex.validate()


def test_w_tensor_pi_of_point_is_w_bar():
    c = normalize(k_delta(0, 4))
    orb = w_tensor_pi(c, 4)
    assert [orb.complex.dim(n) for n in range(5)] == [1] * 5
    for n in range(1, 5):
        assert orb.complex.boundary(n).is_zero()


def test_qm_on_cycle_of_top_degree():
    c = normalize(k_delta(0, 3))
    orb = w_tensor_pi(c, 3)
    out = qm_external(orb, 0, 0, 1)
    assert out == 1 << orb.index(0, 0, 0, 0, 0)


def test_qm_below_degree_vanishes():
    c = normalize(k_delta(1, 3))
    orb = w_tensor_pi(c, 3)
    # m < |c| - 1 kills both terms
    assert qm_external(orb, 0, 2, 1) == 0


def test_qm_commutes_with_boundary():
    c = normalize(k_delta(2, 5))
    orb = w_tensor_pi(c, 10)
    for n in range(1, 5):
        for a in range(c.dim(n)):
            for m in range(0, 5):
                if n + m > orb.complex.hi or n - 1 + m > orb.complex.hi:
                    continue
                assert qm_is_chain_level(orb, m, n, 1 << a)


def test_qm_natural_under_chain_maps():
    m1 = k_delta(1, 4)
    m0 = k_delta(0, 4)
    c1 = normalize(m1)
    c0 = normalize(m0)
    # collapse map Delta^1 -> Delta^0 induces a chain map
    collapse = {n: BitMatrix(c0.dim(n), c1.dim(n), [(1 << c1.dim(n)) - 1] * c0.dim(n)) for n in range(5)}
    orb1 = w_tensor_pi(c1, 4)
    orb0 = w_tensor_pi(c0, 4)
    big = orbit_square_map(orb1, orb0, collapse)
    for n in range(3):
        for a in range(c1.dim(n)):
            for m in range(n, n + 3):
                lhs = big[n + m].apply(qm_external(orb1, m, n, 1 << a))
                rhs = qm_external(orb0, m, n, collapse[n].apply(1 << a))
                assert lhs == rhs
