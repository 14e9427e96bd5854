"""One test per acceptance criterion; each records a PASS/FAIL line."""

import random
import time
import warnings
from contextlib import contextmanager
from fractions import Fraction as F
from math import gcd

from conftest import ACCEPTANCE_LINES
from cubar.chaincore import Chain, verify_dd_zero
from cubar.coeff import RingSpec, WeightVector, index
from cubar.cubeexpr import AffineCell, Base, canonical
from cubar.cwcalc import TrivialCoefficientWarning, consistency_check
from cubar.gridmodel import connecting_and_les_check, load_builtin
from cubar.homotopylab import (NoSpanWitness, PrismHomotopy, subdivide, verify_prism_identity,
                               verify_sd_homotopy, verify_sd_naturality)
from cubar.modalg import FGModulePresentation, Matrix, determinant, smith_normal_form
from cubar.reduce import gamma_boundary_matrices, variant_matrices
from oracles import classical_homology, load_cells

Z = RingSpec.integers()


@contextmanager
def criterion(number, title, limit=None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
    except BaseException as exc:
        line = f"[{number:2d}] FAIL  {title}: {exc}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"[{number:2d}] PASS  {title} ({time.perf_counter() - start:.2f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def thirty_weights():
    """Thirty integer weights covering the indices 0, 1, -1, 2, 5 and 11."""
    fixed = [(1, -1), (3, -3), (0, 0), (2, -1), (-2, 1), (1, 1), (2, 3), (1, 4),
             (5, 6), (9, 1, 4, -3), (1, 0, -1), (4, -5, 2)]
    rng = random.Random(2024)
    out = list(fixed)
    while len(out) < 30:
        L = rng.randint(1, 3)
        out.append(tuple(rng.randint(-6, 6) for _ in range(L + 1)))
    ws = [WeightVector.of(w) for w in out]
    assert {0, 1, -1, 2, 5, 11} <= {index(w) for w in ws}
    return ws


def cyclic(order):
    return FGModulePresentation.from_orders(Z, [order])


def test_01_point_raw_tables():
    with criterion(1, "raw point homology equals R/sigma R (even), ann(sigma) (odd)", 1.0):
        for w in thirty_weights():
            s = abs(index(w))
            bm = variant_matrices(load_builtin("point", w.L), w, 0, 12)
            for n in range(13):
                expect = cyclic(s) if n % 2 == 0 else \
                    (FGModulePresentation(Z, 1, ()) if s == 0 else FGModulePresentation.zero(Z))
                assert bm.homology(n) == expect, (w, n)


def test_02_point_normalized():
    with criterion(2, "normalized point homology is R/sigma R in degree 0, 0 above", 1.0):
        for w in thirty_weights():
            bm = gamma_boundary_matrices(load_builtin("point", w.L), w, pad_to=13)
            got = [bm.homology(n) for n in range(13)]
            assert got == [cyclic(abs(index(w)))] + [FGModulePresentation.zero(Z)] * 12, w


def test_03_beta_tables():
    with criterion(3, "cut complexes for (1,4) at beta 7 and 8", 1.0):
        w = WeightVector.of((1, 4))
        z5 = {0, 8, 10, 12, 14}
        tables = {7: ["Z" if n == 7 else "Z_5" if n in z5 else "0" for n in range(16)],
                  8: ["Z_5" if n in z5 else "0" for n in range(16)]}
        for beta, expect in tables.items():
            bm = variant_matrices(load_builtin("point"), w, beta, 15)
            assert [str(bm.homology(n)) for n in range(16)] == expect, beta


def test_04_double_boundary():
    with criterion(4, "double boundary cancels pairwise on 200 generators", 10.0):
        rng = random.Random(4)
        for _ in range(200):
            n, L = rng.randint(1, 5), rng.randint(1, 4)
            w = WeightVector.of(tuple(rng.randint(-5, 5) for _ in range(L + 1)))
            T = Base.random(rng, n, 2, 1)
            cert = verify_dd_zero(T, w)
            assert cert.ok and cert.residual.is_zero()
            assert cert.terms == n * (n - 1) * (L + 1) ** 2


def test_05_prism_homotopy():
    with criterion(5, "prism homotopy identity on 50 generators", 30.0):
        rng = random.Random(5)
        done = 0
        while done < 50:
            n, L = rng.randint(0, 3), rng.randint(1, 3)
            w = WeightVector.of(tuple(rng.randint(-5, 5) for _ in range(L + 1)))
            try:
                h = PrismHomotopy.from_weight(w)
            except NoSpanWitness:
                continue
            cert = verify_prism_identity(Base.random(rng, n, 2, 2), h, F(1, 6 * L))
            assert cert.ok, cert.residual
            done += 1


def test_06_subdivision_identities():
    with criterion(6, "subdivision commutes with the boundary; subdivision homotopies", 60.0):
        rng = random.Random(6)
        for _ in range(50):
            T = Base.random(rng, rng.randint(0, 3), 2, 2)
            assert verify_sd_naturality(T, rng.randint(-5, 5), rng.randint(-5, 5)).ok
        for _ in range(20):
            T = Base.random(rng, rng.randint(0, 2), 2, 2)
            a, b = rng.randint(-5, 5), rng.randint(-5, 5)
            assert verify_sd_homotopy(T, a, b, False).ok
            assert verify_sd_homotopy(T, a, b, True).ok


def _piece(e, v):
    """The affine cube x -> (e + v x) / 3, built without the clamp machinery."""
    n = len(e)
    return canonical(AffineCell(tuple(F(x, 3) for x in e),
                                [[F(v[i], 3) if i == j else 0 for j in range(n)]
                                 for i in range(n)], n))


def test_07_subdivision_listings():
    with criterion(7, "subdivision of the 1- and 2-cube, term for term"):
        sd1 = [(-1, (0,), (1,)), (1, (2,), (-1,)), (-1, (2,), (1,))]
        sd2 = [(-1, (0, 0), (1, 1)), (-1, (2, 0), (1, 1)), (1, (2, 0), (-1, 1)),
               (-1, (0, 2), (1, 1)), (1, (0, 2), (1, -1)), (1, (2, 2), (-1, 1)),
               (-1, (2, 2), (1, 1)), (1, (2, 2), (1, -1)), (-1, (2, 2), (-1, -1))]
        for n, listing in ((1, sd1), (2, sd2)):
            expect = Chain.from_terms(Z, n, [(_piece(e, v), s) for s, e, v in listing])
            got = subdivide(AffineCell.identity(n))
            assert len(got) == len(listing) == 3 ** n
            assert got == expect


def test_08_long_exact_sequence():
    with criterion(8, "long exact sequence of (interval, ends) and (disk, circle)", 5.0):
        for name in ("interval-pair", "d2-pair"):
            m = load_builtin(name)
            for w in ((1, -1), (2, 3)):
                rep = connecting_and_les_check(m.generators(), m.sub_generators(),
                                               WeightVector.of(w))
                assert rep.exact, [s for s in rep.slots if not s["exact"]]


def test_09_classical_recovery():
    with criterion(9, "normalized (1,-1) homology of S1, S2, T2 is classical"):
        for name in ("s1", "s2", "t2"):
            bm = gamma_boundary_matrices(load_builtin(name), WeightVector.of((1, -1)))
            got = [(h.free_rank, list(h.torsion)) for h in (bm.homology(n) for n in range(4))]
            assert got == classical_homology(load_cells(name), range(4)), name


def test_10_two_pipelines_on_the_point():
    with criterion(10, "closed-form prediction equals raw point homology, |a|,|b| <= 9"):
        p = load_builtin("point")
        pairs = 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrivialCoefficientWarning)
            for a in range(-9, 10):
                for b in range(-9, 10):
                    if gcd(a, b) == 1:
                        rep = consistency_check(p, a, b, 12)
                        assert rep.computed is not None and rep.ok, (a, b)
                        pairs += 1
        assert pairs > 200


def test_11_smith_normal_form():
    with criterion(11, "Smith form reconstruction and unimodularity, 100 matrices", 20.0):
        rng = random.Random(11)
        for _ in range(100):
            m, n = rng.randint(1, 30), rng.randint(1, 30)
            M = Matrix.from_rows([[rng.randint(-50, 50) for _ in range(n)] for _ in range(m)], n)
            S = smith_normal_form(M)
            assert S.U @ M @ S.V == S.D and S.D.is_diagonal()
            assert abs(determinant(S.U)) == 1 and abs(determinant(S.V)) == 1
            d = [x for x in S.D.diagonal_entries() if x]
            assert all(x > 0 for x in d) and all(y % x == 0 for x, y in zip(d, d[1:]))
