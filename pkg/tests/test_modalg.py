import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubar.coeff import RingSpec
from cubar.modalg import (FGModulePresentation, Lattice, Matrix, change_coefficients,
                          determinant, homology_from_matrices, invariant_factors,
                          kernel_basis, rank_over_q, smith_normal_form)
from oracles import sympy_snf_invariants

Z = RingSpec.integers()


def snf_ok(M):
    S = smith_normal_form(M)
    assert S.U @ M @ S.V == S.D
    assert abs(determinant(S.U)) == 1 and abs(determinant(S.V)) == 1
    d = S.D.diagonal_entries()
    assert S.D.is_diagonal() and all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert d[:len(nz)] == nz
    return S


def test_snf_examples():
    assert snf_ok(Matrix.identity(3)).D == Matrix.identity(3)
    assert snf_ok(Matrix.from_rows([[2, 4], [6, 8]])).invariants == [2, 4]
    S = snf_ok(Matrix.zeros(2, 3))
    assert S.D.is_zero() and S.U == Matrix.identity(2) and S.V == Matrix.identity(3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 7), st.integers(0, 7), st.randoms(use_true_random=False))
def test_snf_matches_sympy(m, n, rnd):
    rows = [[rnd.randint(-9, 9) for _ in range(n)] for _ in range(m)]
    S = snf_ok(Matrix.from_rows(rows, n))
    assert S.invariants == sympy_snf_invariants(rows)


def test_homology_examples():
    # point model, odd degree matrix [11] feeding an even degree
    H = homology_from_matrices(Matrix.from_rows([[0]]), Matrix.from_rows([[11]]))
    assert H == FGModulePresentation(Z, 0, (11,))
    H = homology_from_matrices(Matrix.from_rows([[0]]), Matrix.from_rows([[0]]))
    assert H == FGModulePresentation(Z, 1, ())


def test_homology_quotient_and_rings():
    d = Matrix.from_rows([[0]])
    assert str(homology_from_matrices(d, d, Z, q_n=5, q_prev=5)) == "Z_5"
    Z6 = RingSpec.mod(6)
    assert homology_from_matrices(d, Matrix.from_rows([[2]]), Z6) == \
        FGModulePresentation.from_orders(Z6, [2])
    Q = RingSpec.rationals()
    assert homology_from_matrices(d, Matrix.from_rows([[Fraction(1, 2)]]), Q).is_zero()
    with pytest.raises(ValueError):
        homology_from_matrices(Matrix.from_rows([[1]]), Matrix.from_rows([[1]]))


def test_change_coefficients_examples():
    Zg = FGModulePresentation(Z, 1, ())
    zero = FGModulePresentation.zero(Z)
    assert str(change_coefficients([Zg], 5, 0)) == "Z_5"
    assert str(change_coefficients([FGModulePresentation(Z, 0, (5,)), zero], 5, 1)) == "Z_5"
    assert change_coefficients([FGModulePresentation(Z, 0, (2,))], 5, 0).is_zero()
    with pytest.raises(ValueError):
        change_coefficients([Zg], 1, 0)


def _mod_p_rank(rows, p):
    rows = [[x % p for x in r] for r in rows]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.randoms(use_true_random=False))
def test_change_coefficients_vs_field_snf(p, rnd):
    # a random complex Z^a <- Z^b <- Z^c with d1 d2 = 0
    a, b, c = rnd.randint(1, 4), rnd.randint(1, 5), rnd.randint(1, 4)
    d2 = [[rnd.randint(-3, 3) for _ in range(c)] for _ in range(b)]
    K = kernel_basis(Matrix.from_rows(d2, c).T)  # vectors y with y.d2 = 0
    d1 = []
    for _ in range(a):
        cs = [rnd.randint(-2, 2) for _ in K]
        d1.append([sum(ci * v[j] for ci, v in zip(cs, K)) for j in range(b)])
    M1, M2 = Matrix.from_rows(d1, b), Matrix.from_rows(d2, c)
    H0 = homology_from_matrices(Matrix.zeros(0, a), M1)
    H1 = homology_from_matrices(M1, M2)
    got = change_coefficients([H0, H1], p, 1)
    expect = b - _mod_p_rank(d1, p) - _mod_p_rank(d2, p)
    assert got.free_rank == 0 and len(got.torsion) == expect


def test_linear_algebra_random_bulk():
    rng = random.Random(5)
    for _ in range(30):
        m, n = rng.randint(1, 12), rng.randint(1, 12)
        M = Matrix.from_rows([[rng.randint(-50, 50) for _ in range(n)] for _ in range(m)], n)
        S = snf_ok(M)
        assert S.rank == rank_over_q(M)
        for v in kernel_basis(M):
            assert not any(M.apply(v))


def test_lattice_membership():
    L = Lattice([(2, 0), (0, 3)], 2)
    assert L.contains((4, -3)) and not L.contains((1, 0))
    assert L == Lattice([(2, 3), (0, 3)], 2)
    assert L.coordinates((2, 3)) is not None


def test_presentations():
    P = FGModulePresentation.from_orders(Z, [0, 6, 4, 1])
    assert P.free_rank == 1 and P.torsion == (2, 12)
    assert FGModulePresentation.from_json(P.to_json(), Z) == P
    assert str(FGModulePresentation.zero(Z)) == "0"
    assert invariant_factors([0, 2, 3]) == (1, (6,))
    Z10 = RingSpec.mod(10)
    assert FGModulePresentation.from_orders(Z10, [10]).free_rank == 1
    with pytest.raises(ValueError):
        FGModulePresentation(Z10, 0, (3,))
