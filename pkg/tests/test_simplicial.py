import pytest

from cosq.chains import chain_map_ok, homology, homology_dims, w_complex
from cosq.gf2 import BitMatrix, rank
from cosq.simplicial import (
    BASE,
    add_basepoint,
    build_preset,
    classifying_pi,
    cofiber,
    eilenberg_pi,
    homotopy_orbits,
    kan_suspension,
    k_eilenberg_pi,
    linearize,
    normalize,
    pi_tensor_square,
    product,
    simplex,
    skeleton,
    sm_tensor,
    trivial_pi,
    xi,
)


def test_simplex_level_counts():
    d1 = simplex(1, 3)
    assert d1.size(1) == 3
    d2 = simplex(2, 3)
    assert d2.size(0) == 3 and d2.size(2) == 10


def test_preset_spaces_satisfy_identities():
    for space in (
        simplex(2, 3),
        add_basepoint(simplex(1, 3)),
        eilenberg_pi(3),
        classifying_pi(3),
        kan_suspension(add_basepoint(simplex(1, 3))),
    ):
        space.validate()


def test_e_pi_and_b_pi_sizes():
    assert build_preset("e-pi", Q=2).size(1) == 4
    assert build_preset("b-pi", Q=3).size(2) == 4


def test_skeleton_counts():
    sk0 = skeleton(simplex(2, 3), 0)
    # only vertices and their degeneracies remain
    assert sk0.size(0) == 3
    assert sk0.size(1) == 3
    assert all(sk0.core_dim(1, s) == 0 for s in sk0.levels[1])


def test_skeleton_minus_one_pointed_is_basepoint_only():
    sk = build_preset("sk-delta-pointed", p=2, ell=-1, Q=3)
    assert all(sk.size(n) == 1 for n in range(4))


def test_suspension_of_two_points_is_circle():
    s0 = add_basepoint(simplex(0, 3))
    sus = kan_suspension(s0)
    sus.validate()
    beyond_base = [len([s for s in sus.nondegenerate(n) if s != BASE]) for n in range(4)]
    assert beyond_base == [0, 1, 0, 0]
    n_chain = normalize(linearize(sus))
    assert homology_dims(n_chain, range(3)) == {0: 0, 1: 1, 2: 0}


def test_suspension_shifts_homology():
    base = cofiber(
        add_basepoint(simplex(2, 4)),
        lambda n, s: s == BASE or (s != BASE and len(set(s)) <= 1),
    )
    sus = kan_suspension(base)
    n_base = normalize(linearize(base))
    n_sus = normalize(linearize(sus))
    for k in range(3):
        assert homology(n_sus, k + 1).dim == homology(n_base, k).dim


def test_cofiber_of_identity_and_empty():
    x = add_basepoint(simplex(1, 2))
    collapsed = cofiber(x, lambda n, s: True)
    assert all(collapsed.size(n) == 1 for n in range(3))
    unchanged = cofiber(x, lambda n, s: s == BASE)
    assert [unchanged.size(n) for n in range(3)] == [x.size(n) for n in range(3)]


def test_cofiber_of_skeleton_inclusion():
    x = add_basepoint(simplex(1, 3))
    cof = cofiber(x, lambda n, s: s == BASE or x.core_dim(n, s) <= 0)
    edges = [s for s in cof.nondegenerate(1) if s != BASE]
    assert edges == [(0, 1)]


def test_cofiber_rejects_non_closed_subspace():
    x = add_basepoint(simplex(1, 2))
    with pytest.raises(ValueError):
        cofiber(x, lambda n, s: s == (0, 1))


def test_linearize_dims():
    assert linearize(simplex(0, 4)).dims == [1] * 5
    assert linearize(eilenberg_pi(3)).dims == [2, 4, 8, 16]
    pointed = linearize(add_basepoint(simplex(1, 2)))
    assert pointed.dims == [2, 3, 4]


def test_linearized_modules_satisfy_identities():
    linearize(add_basepoint(simplex(2, 3))).validate()
    linearize(classifying_pi(3)).validate()


def test_normalize_point():
    n = normalize(linearize(simplex(0, 4)))
    assert [n.dim(k) for k in range(5)] == [1, 0, 0, 0, 0]


def test_normalize_e_pi_matches_w():
    Q = 4
    nw = normalize(linearize(eilenberg_pi(Q)))
    w = w_complex(Q)
    assert all(nw.dim(k) == 2 for k in range(Q + 1))
    from cosq.simplicial import w_basis_rep

    reps = w_basis_rep(Q)
    for k in range(1, Q + 1):
        # transport the pinned basis and compare differentials
        src = BitMatrix.from_columns(
            nw.dim(k),
            [nw.presentations[k].coords(1 << reps[k][0]),
             nw.presentations[k].coords(1 << reps[k][1])],
        )
        tgt = BitMatrix.from_columns(
            nw.dim(k - 1),
            [nw.presentations[k - 1].coords(1 << reps[k - 1][0]),
             nw.presentations[k - 1].coords(1 << reps[k - 1][1])],
        )
        assert nw.boundary(k) @ src == tgt @ w.boundary(k)


def test_normalize_simplex_homology():
    for p in (1, 2, 3):
        n = normalize(linearize(simplex(p, 4)))
        dims = homology_dims(n, range(4))
        assert dims[0] == 1 and all(dims[k] == 0 for k in (1, 2, 3))


def test_e_pi_contractible():
    n = normalize(linearize(eilenberg_pi(4)))
    dims = homology_dims(n, range(4))
    assert dims == {0: 1, 1: 0, 2: 0, 3: 0}


def test_b_pi_homology():
    n = normalize(linearize(classifying_pi(4)))
    assert homology_dims(n, range(4)) == {0: 1, 1: 1, 2: 1, 3: 1}


def test_sm_tensor_dims_and_identities():
    a = linearize(add_basepoint(simplex(1, 3)))
    b = linearize(classifying_pi(3))
    t = sm_tensor(a, b)
    assert t.dims == [a.dim(n) * b.dim(n) for n in range(4)]
    t.validate()


def test_tensor_with_point_module():
    a = linearize(add_basepoint(simplex(1, 3)))
    kpt = linearize(simplex(0, 3))
    t = sm_tensor(a, kpt)
    assert t.dims == a.dims


def test_tensor_matches_product_space():
    x = simplex(1, 2)
    y = simplex(2, 2)
    t = sm_tensor(linearize(x), linearize(y))
    prod = linearize(product(x, y))
    assert t.dims == prod.dims
