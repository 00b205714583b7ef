import random

import pytest

from cosq.gf2 import (
    BitMatrix,
    QuotientPresentation,
    Subspace,
    dot,
    image_basis,
    induced_matrix,
    kernel_basis,
    quotient_reduce,
    rank,
    solve,
    vector_from_bits,
)


def random_matrix(rng, nrows, ncols):
    return BitMatrix(nrows, ncols, [rng.getrandbits(ncols) for _ in range(nrows)])


def test_rank_identity():
    assert rank(BitMatrix.identity(3)) == 3


def test_rank_zero():
    assert rank(BitMatrix.zeros(4, 5)) == 0


def test_rank_row_of_ones():
    assert rank(BitMatrix(1, 2, [0b11])) == 1


def test_kernel_of_ones_row():
    ker = kernel_basis(BitMatrix(1, 2, [0b11]))
    assert ker.dim == 1
    assert ker.basis == (0b11,)


def test_kernel_of_identity_is_zero():
    assert kernel_basis(BitMatrix.identity(5)).dim == 0


def test_kernel_rank_nullity_random():
    rng = random.Random(17)
    for _ in range(30):
        m = random_matrix(rng, 6, 8)
        ker = kernel_basis(m)
        assert rank(m) + ker.dim == 8
        for b in ker.basis:
            assert m.apply(b) == 0


def test_solve_identity():
    m = BitMatrix.identity(4)
    assert solve(m, 0b1010) == 0b1010


def test_solve_ones_row_pins_free_variable_to_zero():
    m = BitMatrix(1, 2, [0b11])
    x = solve(m, 1)
    assert x == 0b01  # (1, 0): second variable is free, hence zero
    assert m.apply(x) == 1


def test_solve_inconsistent():
    assert solve(BitMatrix.zeros(3, 3), 0b100) is None


def test_solve_random_consistency():
    rng = random.Random(5)
    for _ in range(40):
        m = random_matrix(rng, 7, 5)
        target = m.apply(rng.getrandbits(5))
        x = solve(m, target)
        assert x is not None and m.apply(x) == target


def test_matrix_product_matches_composition():
    rng = random.Random(3)
    for _ in range(20):
        a = random_matrix(rng, 4, 6)
        b = random_matrix(rng, 6, 5)
        v = rng.getrandbits(5)
        assert (a @ b).apply(v) == a.apply(b.apply(v))


def test_transpose_pairing():
    rng = random.Random(9)
    m = random_matrix(rng, 5, 7)
    mt = m.transpose()
    for _ in range(20):
        u = rng.getrandbits(5)
        v = rng.getrandbits(7)
        assert dot(u, m.apply(v)) == dot(mt.apply(u), v)


def test_kron_agrees_with_tensor_action():
    a = BitMatrix.from_dense([[1, 1], [0, 1]])
    b = BitMatrix.from_dense([[1, 0, 1]])
    k = a.kron(b)
    assert (k.nrows, k.ncols) == (2, 6)
    # e_i (x) e_j goes to column i * 3 + j
    for i in range(2):
        for j in range(3):
            expected = 0
            for r in range(2):
                if a.get(r, i):
                    for s in range(1):
                        if b.get(s, j):
                            expected ^= 1 << (r * 1 + s)
            assert k.column(i * 3 + j) == expected


def quotient_fixture():
    ambient = Subspace.full(5)
    modulus = Subspace(5, [vector_from_bits([0, 1]), vector_from_bits([2, 3])])
    return QuotientPresentation(ambient, modulus)


def test_quotient_reduce_kills_modulus():
    q = quotient_fixture()
    assert quotient_reduce(q, vector_from_bits([0, 1])) == 0


def test_quotient_reduce_trivial_modulus():
    q = QuotientPresentation.of_full(4, Subspace.zero(4))
    v = 0b1011
    assert quotient_reduce(q, v) == v


def test_quotient_reduce_constant_on_cosets():
    rng = random.Random(23)
    q = quotient_fixture()
    for _ in range(40):
        v1 = rng.getrandbits(5)
        v2 = rng.getrandbits(5)
        same = q.modulus.contains(v1 ^ v2)
        assert (quotient_reduce(q, v1) == quotient_reduce(q, v2)) == same


def test_quotient_reduce_idempotent_and_linear():
    rng = random.Random(31)
    q = quotient_fixture()
    for _ in range(30):
        v = rng.getrandbits(5)
        w = rng.getrandbits(5)
        assert quotient_reduce(q, quotient_reduce(q, v)) == quotient_reduce(q, v)
        assert quotient_reduce(q, v ^ w) == quotient_reduce(q, v) ^ quotient_reduce(q, w)


def test_quotient_faults_outside_ambient():
    ambient = Subspace(4, [0b0011, 0b1100])
    q = QuotientPresentation(ambient, Subspace(4, [0b0011]))
    with pytest.raises(ValueError):
        quotient_reduce(q, 0b0001)


def test_quotient_coords_roundtrip():
    q = quotient_fixture()
    assert q.dim == 3
    for c in range(8):
        v = q.from_coords(c)
        assert q.coords(v) == c


def test_induced_matrix_well_defined():
    # quotient GF(2)^2 / span{(1,1)} and the swap map, which fixes the coset
    amb = Subspace.full(2)
    mod = Subspace(2, [0b11])
    q = QuotientPresentation(amb, mod)
    swap = BitMatrix.from_dense([[0, 1], [1, 0]])
    ind = induced_matrix(swap, q, q)
    assert ind == BitMatrix.identity(1)


def test_induced_matrix_rejects_bad_map():
    amb = Subspace.full(2)
    q1 = QuotientPresentation(amb, Subspace(2, [0b11]))
    q2 = QuotientPresentation(amb, Subspace.zero(2))
    proj = BitMatrix.from_dense([[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        induced_matrix(proj, q1, q2)


def test_image_basis():
    m = BitMatrix.from_dense([[1, 1, 0], [0, 0, 0], [1, 1, 1]])
    img = image_basis(m)
    assert img.dim == 2
    assert img.contains(m.column(0)) and img.contains(m.column(2))
