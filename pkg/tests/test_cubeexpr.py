import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cubar.cubeexpr import (NO, UNKNOWN, YES, AffineCell, AffineMap, Base, Clamped, CrossJag,
                            CrossZero, CylinderEnd, Face, PostCompose, Warp, aux_curve,
                            canonical, chi, clamp, eta, first_difference, is_degenerate,
                            lattice_points, maps_equal)

I1, I2 = AffineCell.identity(1), AffineCell.identity(2)


def test_clamp_and_curves():
    assert clamp(F(-3, 2)) == 0 and clamp(F(1, 3)) == F(1, 3) and clamp(F(7, 5)) == 1
    assert aux_curve("chi", F(2, 5), L=5, k=2) == 1
    assert aux_curve("eta0", 1, 1) == 1
    assert aux_curve("eta1", 0, 0) == F(2, 3)
    with pytest.raises(ValueError):
        aux_curve("eta0", 2, 0)
    with pytest.raises(ValueError):
        aux_curve("chi", F(1, 2))


@pytest.mark.parametrize("L", [1, 2, 3, 5])
def test_jag_is_a_delta_on_the_grid(L):
    for k in range(L + 1):
        for j in range(L + 1):
            assert chi(L, k, F(j, L)) == (1 if j == k else 0)


def test_warp_curve_boundary_values():
    for x in (F(0), F(1, 3), F(1)):
        # at y = 0 the curves are the subdivision pieces, at y = 1 they are 0, 1, 1
        assert eta(0, x, 0) == x / 3
        assert eta(1, x, 0) == (2 - x) / 3
        assert eta(2, x, 0) == min(F(1), (2 + x) / 3)
        assert (eta(0, x, 1), eta(1, x, 1), eta(2, x, 1)) == (x, 1, 1)
        assert (eta(0, x, 0, True), eta(1, x, 0, True), eta(2, x, 0, True)) == (x, 1, 1)


def test_eval_examples():
    assert Face(I2, 3, 2, 1).eval((F(1, 2),)) == (F(2, 3), F(1, 2))
    assert Clamped(I1, F(1, 3), (2,), (-1,)).eval((0,)) == (F(2, 3),)
    assert CrossJag(I1, 1, 0).eval((F(1, 2), F(1, 2))) == (F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        I2.eval((F(1, 2),))
    with pytest.raises(ValueError):
        I1.eval((F(3, 2),))


def test_degeneracy_examples():
    lifted = Clamped(AffineCell(((0,)), [[1, 0]], 2), F(1, 3), (0, 0), (1, 0))
    assert is_degenerate(lifted) == YES
    assert is_degenerate(I2) == NO
    rng = random.Random(3)
    assert is_degenerate(Warp(Base.random(rng, 1, 2, 4), (1,))) in (YES, NO, UNKNOWN)


def test_maps_equal_examples():
    T = Base.random(random.Random(1), 2, 2, 2)
    assert maps_equal(T, T, F(1, 2))
    for j in (1, 2):
        e = tuple(2 if t == j - 1 else 0 for t in range(2))
        v1 = tuple(1 for _ in range(2))
        vm = tuple(-1 if t == j - 1 else 1 for t in range(2))
        A = Face(Clamped(T, F(1, 3), e, v1), 1, 0, j)
        B = Face(Clamped(T, F(1, 3), e, vm), 1, 0, j)
        assert maps_equal(A, B, F(1, 6))
        assert canonical(A) == canonical(B)
    assert not maps_equal(I1, AffineCell.constant((0,), 1), F(1, 2))
    assert first_difference(I1, AffineCell.constant((0,), 1), F(1, 2)) is not None


def _random_tree(rng, depth, arity):
    """A random expression tree over a random base cube."""
    e = Base.random(rng, arity, 2, rng.choice([1, 2, 3]))
    for _ in range(depth):
        op = rng.choice(["face", "clamp", "warp", "jag", "zero", "cyl", "post"])
        n = e.arity
        if op == "face" and n >= 1:
            L = rng.randint(1, 3)
            e = Face(e, L, rng.randint(0, L), rng.randint(1, n))
        elif op == "clamp" and n >= 1:
            e = Clamped(e, F(1, 3), tuple(rng.choice((0, 2)) for _ in range(n)),
                        tuple(rng.choice((1, -1)) for _ in range(n)))
        elif op == "warp" and n <= 2:
            e = Warp(e, tuple(rng.randint(0, 2) for _ in range(n)), rng.random() < 0.5)
        elif op == "jag" and n <= 2:
            L = rng.randint(1, 3)
            e = CrossJag(e, L, rng.randint(0, L))
        elif op == "zero" and n <= 2:
            e = CrossZero(e)
        elif op == "cyl":
            e = CylinderEnd(e, rng.randint(0, 1))
        elif op == "post":
            d = e.target_dim
            e = PostCompose(e, AffineMap(tuple(F(rng.randint(-2, 2)) for _ in range(2)),
                                         [[rng.randint(-1, 1) for _ in range(d)] for _ in range(2)],
                                         d))
    return e


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(0, 2))
def test_normal_form_preserves_the_map(seed, depth, arity):
    rng = random.Random(seed)
    e = _random_tree(rng, depth, arity)
    nf = canonical(e)
    assert nf.arity == e.arity and nf.target_dim == e.target_dim
    step = F(1, 6)
    for p in lattice_points(e.arity, step):
        assert nf.eval(p) == e.eval(p)
    assert canonical(nf) == nf


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_faces_commute(seed):
    # faces in slots j < p: fixing slot p first then j equals j first then p-1
    rng = random.Random(seed)
    T = Base.random(rng, 3, 2, 2)
    L = rng.randint(1, 3)
    i, k = rng.randint(0, L), rng.randint(0, L)
    for j in range(1, 3):
        for p in range(j + 1, 4):
            a = canonical(Face(Face(T, L, k, p), L, i, j))
            b = canonical(Face(Face(T, L, i, j), L, k, p - 1))
            assert a == b


def test_base_json_round_trip():
    T = Base.random(random.Random(7), 2, 3, 2)
    assert Base.from_json(T.to_json()) == T
    with pytest.raises(ValueError):
        Base.from_json({**T.to_json(), "lattice_step": "2/3"})


def test_lattice_points():
    assert len(lattice_points(2, F(1, 3))) == 16
    with pytest.raises(ValueError):
        lattice_points(1, F(2, 3))
